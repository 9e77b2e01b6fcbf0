// Copyright 2026 The qrepeat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrepeat/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qrepeat/kernels.hpp"

namespace qrepeat {
namespace {

std::span<const Complex> flat(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

void require_square(const Matrix& m, const CompositeDims& dims, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
  if (static_cast<std::size_t>(m.rows()) != dims.total()) {
    throw DimensionError(std::string(what) + ": matrix size " +
                         std::to_string(m.rows()) + " does not match dims total " +
                         std::to_string(dims.total()));
  }
}

// Validated, sorted copy of a subsystem index set.
std::vector<std::size_t> normalize_index_set(const CompositeDims& dims,
                                             std::span<const std::size_t> idx) {
  if (idx.empty()) throw DimensionError("subsystem index set is empty");
  std::vector<std::size_t> out(idx.begin(), idx.end());
  for (std::size_t i : out) dims.check_index(i);
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw DimensionError("subsystem index set contains duplicates");
  }
  return out;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& sorted) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0, j = 0; i < n; ++i) {
    if (j < sorted.size() && sorted[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

// Maps each composite index to its index after reordering factors.
std::vector<std::size_t> permutation_map(const CompositeDims& dims,
                                         std::span<const std::size_t> order) {
  const std::size_t n = dims.factors();
  if (order.size() != n) throw DimensionError("factor order has wrong length");
  std::vector<bool> seen(n, false);
  for (std::size_t f : order) {
    dims.check_index(f);
    if (seen[f]) throw DimensionError("factor order repeats an index");
    seen[f] = true;
  }
  // Old strides (row-major digits).
  std::vector<std::size_t> old_stride(n, 1);
  for (std::size_t i = n; i-- > 1;) old_stride[i - 1] = old_stride[i] * dims[i];
  // New stride for each old factor.
  std::vector<std::size_t> new_stride_of_old(n, 1);
  std::size_t s = 1;
  for (std::size_t i = n; i-- > 0;) {
    new_stride_of_old[order[i]] = s;
    s *= dims[order[i]];
  }
  std::vector<std::size_t> map(dims.total());
  for (std::size_t idx = 0; idx < dims.total(); ++idx) {
    std::size_t rem = idx;
    std::size_t out = 0;
    for (std::size_t f = 0; f < n; ++f) {
      const std::size_t digit = rem / old_stride[f];
      rem %= old_stride[f];
      out += digit * new_stride_of_old[f];
    }
    map[idx] = out;
  }
  return map;
}

bool is_identity_order(std::span<const std::size_t> order) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] != i) return false;
  }
  return true;
}

CompositeDims reorder(const CompositeDims& dims, std::span<const std::size_t> order) {
  std::vector<std::size_t> d;
  d.reserve(order.size());
  for (std::size_t f : order) d.push_back(dims[f]);
  return CompositeDims(std::move(d));
}

}  // namespace

// ---- CompositeDims -----------------------------------------------------------

CompositeDims::CompositeDims(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  for (std::size_t d : dims_) {
    if (d < 1) throw DimensionError("subsystem dimension must be >= 1");
    total_ *= d;
  }
}

CompositeDims CompositeDims::concat(const CompositeDims& other) const {
  std::vector<std::size_t> d = dims_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  return CompositeDims(std::move(d));
}

CompositeDims CompositeDims::select(std::span<const std::size_t> indices) const {
  std::vector<std::size_t> d;
  for (std::size_t i : indices) {
    check_index(i);
    d.push_back(dims_[i]);
  }
  return CompositeDims(std::move(d));
}

void CompositeDims::check_index(std::size_t idx) const {
  if (idx >= dims_.size()) {
    throw DimensionError("subsystem index " + std::to_string(idx) +
                         " out of range for " + std::to_string(dims_.size()) +
                         " factors");
  }
}

// ---- StateVector -------------------------------------------------------------

StateVector::StateVector(Vector amplitudes, CompositeDims dims)
    : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != dims_.total()) {
    throw DimensionError("state length does not match dims total");
  }
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) >= kTolAlg) {
    throw InvariantError("state vector is not normalized (norm " +
                         std::to_string(norm) + ")");
  }
}

StateVector::StateVector(Vector amplitudes)
    : StateVector(amplitudes, CompositeDims{static_cast<std::size_t>(amplitudes.size())}) {}

StateVector StateVector::normalized(Vector amplitudes, CompositeDims dims) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvariantError("cannot normalize a zero or non-finite vector");
  }
  amplitudes /= norm;
  return StateVector(std::move(amplitudes), std::move(dims));
}

StateVector StateVector::normalized(Vector amplitudes) {
  CompositeDims dims{static_cast<std::size_t>(amplitudes.size())};
  return normalized(std::move(amplitudes), std::move(dims));
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("basis index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

Complex StateVector::inner(const StateVector& other) const {
  if (dim() != other.dim()) throw DimensionError("inner product of states of different dimension");
  return amplitudes_.dot(other.amplitudes_);
}

// ---- DensityOperator -----------------------------------------------------------

DensityOperator::DensityOperator(NoCheck, Matrix matrix, CompositeDims dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {}

DensityOperator::DensityOperator(Matrix matrix, CompositeDims dims)
    : dims_(std::move(dims)) {
  require_square(matrix, dims_, "density operator");
  const double herm = hermiticity_residual(matrix);
  if (herm >= kTolAlg) {
    throw InvariantError("density operator is not Hermitian (residual " +
                         std::to_string(herm) + ")");
  }
  const Complex tr = matrix.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) >= kTolAlg) {
    throw InvariantError("density operator trace is not 1 (got " +
                         std::to_string(tr.real()) + ")");
  }
  Matrix h = 0.5 * (matrix + matrix.adjoint());
  HermitianEigen eig = hermitian_eigen(h);
  const double min_eig = eig.values.minCoeff();
  if (min_eig <= -kTolAlg) {
    throw InvariantError("density operator has eigenvalue " + std::to_string(min_eig));
  }
  if (min_eig < 0.0) {
    RealVector clipped = eig.values.cwiseMax(0.0);
    clipped /= clipped.sum();
    h = eig.vectors * clipped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    h = 0.5 * (h + h.adjoint()).eval();
  }
  matrix_ = std::move(h);
}

DensityOperator::DensityOperator(const Matrix& matrix)
    : DensityOperator(matrix, CompositeDims{static_cast<std::size_t>(matrix.rows())}) {}

DensityOperator DensityOperator::pure(const StateVector& psi) {
  return DensityOperator(NoCheck{}, psi.projector(), psi.dims());
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityOperator(NoCheck{}, Matrix::Identity(n, n) / static_cast<double>(dim),
                         CompositeDims{dim});
}

DensityOperator DensityOperator::unchecked(Matrix matrix, CompositeDims dims) {
  require_square(matrix, dims, "density operator");
  return DensityOperator(NoCheck{}, std::move(matrix), std::move(dims));
}

double DensityOperator::purity() const { return hs_inner(matrix_, matrix_); }

RealVector DensityOperator::eigenvalues() const { return hermitian_eigen(matrix_).values; }

DensityOperator DensityOperator::evolve(const UnitaryOperator& u) const {
  if (u.dim() != dim()) throw DimensionError("evolve: unitary dimension mismatch");
  return DensityOperator(NoCheck{}, u.matrix() * matrix_ * u.matrix().adjoint(), dims_);
}

// ---- UnitaryOperator ---------------------------------------------------------

UnitaryOperator::UnitaryOperator(NoCheck, Matrix matrix, CompositeDims dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {}

UnitaryOperator::UnitaryOperator(Matrix matrix, CompositeDims dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
  require_square(matrix_, dims_, "unitary operator");
  const double res = unitarity_residual();
  if (!(res < kTolAlg)) {
    throw InvariantError("operator is not unitary (residual " + std::to_string(res) + ")");
  }
}

UnitaryOperator::UnitaryOperator(const Matrix& matrix)
    : UnitaryOperator(matrix, CompositeDims{static_cast<std::size_t>(matrix.rows())}) {}

UnitaryOperator UnitaryOperator::identity(std::size_t dim) {
  return identity(CompositeDims{dim});
}

UnitaryOperator UnitaryOperator::identity(const CompositeDims& dims) {
  const auto n = static_cast<Eigen::Index>(dims.total());
  return UnitaryOperator(NoCheck{}, Matrix::Identity(n, n), dims);
}

UnitaryOperator UnitaryOperator::unchecked(Matrix matrix, CompositeDims dims) {
  require_square(matrix, dims, "unitary operator");
  return UnitaryOperator(NoCheck{}, std::move(matrix), std::move(dims));
}

UnitaryOperator UnitaryOperator::adjoint() const {
  return UnitaryOperator(NoCheck{}, matrix_.adjoint(), dims_);
}

StateVector UnitaryOperator::apply(const StateVector& psi) const {
  if (psi.dim() != dim()) throw DimensionError("apply: unitary dimension mismatch");
  return StateVector::normalized(matrix_ * psi.amplitudes(), psi.dims());
}

double UnitaryOperator::unitarity_residual() const {
  const auto n = matrix_.rows();
  return max_abs(matrix_.adjoint() * matrix_ - Matrix::Identity(n, n));
}

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("unitary product dimension mismatch");
  return UnitaryOperator::unchecked(a.matrix() * b.matrix(), a.dims());
}

Vector SchmidtDecomposition::reconstruct() const {
  if (left_basis.empty()) return {};
  const Eigen::Index n = static_cast<Eigen::Index>(left_basis.front().dim() *
                                                   right_basis.front().dim());
  Vector out = Vector::Zero(n);
  for (std::size_t k = 0; k < rank(); ++k) {
    out += coefficients(static_cast<Eigen::Index>(k)) *
           kron(left_basis[k].amplitudes(), right_basis[k].amplitudes());
  }
  return out;
}

// ---- helpers -----------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_residual(const Matrix& m) { return max_abs(m - m.adjoint()); }

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

double hs_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("hs_distance: shape mismatch");
  }
  return std::sqrt(kernels::distance_sq(flat(a), flat(b)));
}

double hs_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("hs_inner: shape mismatch");
  }
  return kernels::real_inner(flat(a), flat(b));
}

Matrix permute_factors(const Matrix& op, const CompositeDims& dims,
                       std::span<const std::size_t> order) {
  require_square(op, dims, "permute_factors");
  if (is_identity_order(order) && order.size() == dims.factors()) return op;
  const std::vector<std::size_t> map = permutation_map(dims, order);
  const auto n = static_cast<Eigen::Index>(dims.total());
  Matrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto nc = static_cast<Eigen::Index>(map[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < n; ++r) {
      out(static_cast<Eigen::Index>(map[static_cast<std::size_t>(r)]), nc) = op(r, c);
    }
  }
  return out;
}

Vector permute_factors(const Vector& psi, const CompositeDims& dims,
                       std::span<const std::size_t> order) {
  if (static_cast<std::size_t>(psi.size()) != dims.total()) {
    throw DimensionError("permute_factors: vector length mismatch");
  }
  if (is_identity_order(order) && order.size() == dims.factors()) return psi;
  const std::vector<std::size_t> map = permutation_map(dims, order);
  Vector out(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    out(static_cast<Eigen::Index>(map[static_cast<std::size_t>(i)])) = psi(i);
  }
  return out;
}

Matrix embed(const Matrix& op, const CompositeDims& dims,
             std::span<const std::size_t> targets) {
  if (targets.empty()) throw DimensionError("embed: no target factors");
  std::vector<std::size_t> sorted(targets.begin(), targets.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DimensionError("embed: repeated target factor");
  }
  for (std::size_t t : sorted) dims.check_index(t);
  std::size_t target_dim = 1;
  for (std::size_t t : targets) target_dim *= dims[t];
  if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != target_dim) {
    throw DimensionError("embed: operator size does not match target factors");
  }
  std::vector<std::size_t> order(targets.begin(), targets.end());
  const std::vector<std::size_t> rest = complement(dims.factors(), sorted);
  order.insert(order.end(), rest.begin(), rest.end());
  const auto rest_dim = static_cast<Eigen::Index>(dims.total() / target_dim);
  const Matrix lifted = kron(op, Matrix::Identity(rest_dim, rest_dim));
  std::vector<std::size_t> inverse(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) inverse[order[i]] = i;
  return permute_factors(lifted, reorder(dims, order), inverse);
}

Matrix partial_trace(const Matrix& op, const CompositeDims& dims,
                     std::span<const std::size_t> keep) {
  require_square(op, dims, "partial_trace");
  const std::vector<std::size_t> kept = normalize_index_set(dims, keep);
  std::size_t keep_dim = 1;
  for (std::size_t k : kept) keep_dim *= dims[k];
  const auto dk = static_cast<Eigen::Index>(keep_dim);
  const auto dt = static_cast<Eigen::Index>(dims.total() / keep_dim);

  // Kept factors forming a leading or trailing block need no reordering.
  const bool leading = kept.back() == kept.size() - 1;
  const bool trailing = kept.front() == dims.factors() - kept.size();
  if (leading || trailing) {
    Matrix out = Matrix::Zero(dk, dk);
    if (trailing) {
      for (Eigen::Index t = 0; t < dt; ++t) out += op.block(t * dk, t * dk, dk, dk);
    } else {
      for (Eigen::Index j = 0; j < dk; ++j) {
        for (Eigen::Index i = 0; i < dk; ++i) {
          Complex acc = 0.0;
          for (Eigen::Index t = 0; t < dt; ++t) acc += op(i * dt + t, j * dt + t);
          out(i, j) = acc;
        }
      }
    }
    return out;
  }

  const std::vector<std::size_t> traced = complement(dims.factors(), kept);
  std::vector<std::size_t> order = traced;
  order.insert(order.end(), kept.begin(), kept.end());
  const Matrix arranged = permute_factors(op, dims, order);
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index t = 0; t < dt; ++t) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      const Complex* src = arranged.data() + (t * dk + j) * arranged.rows() + t * dk;
      kernels::accumulate({out.data() + j * dk, static_cast<std::size_t>(dk)},
                          {src, static_cast<std::size_t>(dk)});
    }
  }
  return out;
}

HermitianEigen hermitian_eigen(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()));
  if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// ---- operations ----------------------------------------------------------------

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  return StateVector(kron(a.amplitudes(), b.amplitudes()), a.dims().concat(b.dims()));
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator::unchecked(kron(a.matrix(), b.matrix()), a.dims().concat(b.dims()));
}

UnitaryOperator tensor_product(const UnitaryOperator& a, const UnitaryOperator& b) {
  return UnitaryOperator::unchecked(kron(a.matrix(), b.matrix()), a.dims().concat(b.dims()));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep) {
  const std::vector<std::size_t> kept = normalize_index_set(rho.dims(), keep);
  return DensityOperator::unchecked(partial_trace(rho.matrix(), rho.dims(), kept),
                                    rho.dims().select(kept));
}

DensityOperator partial_trace(const DensityOperator& rho,
                              std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

double hs_inner(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("hs_inner: dimension mismatch");
  return hs_inner(rho.matrix(), sigma.matrix());
}

double support_overlap(const DensityOperator& rho, const DensityOperator& sigma) {
  return hs_inner(rho, sigma);
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows()) throw DimensionError("fidelity: dimension mismatch");
  if (rho.rows() == 2) {
    // qubits: (Tr sqrt A)^2 = Tr A + 2 sqrt(det A) for 2x2 A >= 0
    const double tr = (rho * sigma).trace().real();
    const double det = rho.determinant().real() * sigma.determinant().real();
    return tr + 2.0 * std::sqrt(std::max(0.0, det));
  }
  const HermitianEigen e = hermitian_eigen(rho);
  const RealVector roots = e.values.cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_rho = e.vectors * roots.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  const HermitianEigen inner = hermitian_eigen(sqrt_rho * sigma * sqrt_rho);
  const double s = inner.values.cwiseMax(0.0).cwiseSqrt().sum();
  return s * s;
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  return fidelity(rho.matrix(), sigma.matrix());
}

SchmidtDecomposition schmidt_decompose(const StateVector& psi,
                                       std::span<const std::size_t> left) {
  const CompositeDims& dims = psi.dims();
  if (dims.factors() < 2) throw DimensionError("schmidt_decompose: need at least two factors");
  const std::vector<std::size_t> left_sorted = normalize_index_set(dims, left);
  if (left_sorted.size() == dims.factors()) {
    throw DimensionError("schmidt_decompose: bipartition leaves the right side empty");
  }
  const std::vector<std::size_t> right = complement(dims.factors(), left_sorted);
  std::vector<std::size_t> order(left.begin(), left.end());
  order.insert(order.end(), right.begin(), right.end());
  const Vector arranged = permute_factors(psi.amplitudes(), dims, order);

  const CompositeDims left_dims = reorder(dims, std::span(order).first(left.size()));
  const CompositeDims right_dims = dims.select(right);
  const auto dl = static_cast<Eigen::Index>(left_dims.total());
  const auto dr = static_cast<Eigen::Index>(right_dims.total());
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Matrix m = Eigen::Map<const RowMajor>(arranged.data(), dl, dr);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);

  struct Term {
    double s;
    Vector l, r;
    Eigen::Index lead;
  };
  std::vector<Term> terms;
  const RealVector& sv = svd.singularValues();
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (!(sv(k) > 1e-13)) continue;
    Vector l = svd.matrixU().col(k);
    Vector r = svd.matrixV().col(k).conjugate();
    Eigen::Index lead = 0;
    while (lead < l.size() && std::abs(l(lead)) <= 1e-12) ++lead;
    const Complex phase = l(lead) / std::abs(l(lead));
    l *= std::conj(phase);
    r *= phase;
    terms.push_back({sv(k), std::move(l), std::move(r), lead});
  }
  // Group near-equal coefficients, then order each group by leading position.
  for (std::size_t start = 0; start < terms.size();) {
    std::size_t end = start + 1;
    while (end < terms.size() && terms[start].s - terms[end].s < kTolAlg) ++end;
    std::stable_sort(terms.begin() + static_cast<std::ptrdiff_t>(start),
                     terms.begin() + static_cast<std::ptrdiff_t>(end),
                     [](const Term& a, const Term& b) { return a.lead < b.lead; });
    start = end;
  }

  SchmidtDecomposition out;
  out.coefficients.resize(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    out.coefficients(static_cast<Eigen::Index>(k)) = terms[k].s;
    out.left_basis.push_back(StateVector::normalized(terms[k].l, left_dims));
    out.right_basis.push_back(StateVector::normalized(terms[k].r, right_dims));
  }
  return out;
}

SchmidtDecomposition schmidt_decompose(const StateVector& psi,
                                       std::initializer_list<std::size_t> left) {
  return schmidt_decompose(psi, std::span<const std::size_t>(left.begin(), left.size()));
}

StateVector purify(const DensityOperator& rho) {
  const HermitianEigen e = hermitian_eigen(rho.matrix());
  const std::size_t d = rho.dim();
  Vector out = Vector::Zero(static_cast<Eigen::Index>(d * d));
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    const double w = std::sqrt(std::max(e.values(k), 0.0));
    if (w == 0.0) continue;
    out += w * kron(Vector(e.vectors.col(k)), Vector(e.vectors.col(k).conjugate()));
  }
  return StateVector::normalized(std::move(out), rho.dims().concat(rho.dims()));
}

StateVector purify_in_basis(const DensityOperator& rho, const Matrix& purifier_basis) {
  const std::size_t d = rho.dim();
  if (static_cast<std::size_t>(purifier_basis.rows()) != d ||
      static_cast<std::size_t>(purifier_basis.cols()) != d) {
    throw DimensionError("purify_in_basis: purifier basis must be d x d");
  }
  if (UnitaryOperator::unchecked(purifier_basis, CompositeDims{d}).unitarity_residual() >=
      kTolAlg) {
    throw InvariantError("purify_in_basis: purifier basis is not orthonormal");
  }
  const HermitianEigen e = hermitian_eigen(rho.matrix());
  Vector out = Vector::Zero(static_cast<Eigen::Index>(d * d));
  const auto n = static_cast<Eigen::Index>(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index k = n - 1 - j;  // nonincreasing eigenvalues
    const double w = std::sqrt(std::max(e.values(k), 0.0));
    if (w == 0.0) continue;
    out += w * kron(Vector(e.vectors.col(k)), Vector(purifier_basis.col(j)));
  }
  return StateVector::normalized(std::move(out), rho.dims().concat(CompositeDims{d}));
}

UnitaryOperator random_unitary(std::size_t dim, Seed seed) {
  if (dim < 1) throw DimensionError("random_unitary: dim must be >= 1");
  Rng rng(seed);
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
  }
  return UnitaryOperator(std::move(q), CompositeDims{dim});
}

DensityOperator random_density(std::size_t dim, std::size_t rank, Seed seed) {
  if (dim < 1) throw DimensionError("random_density: dim must be >= 1");
  if (rank < 1 || rank > dim) {
    throw PreconditionError("random_density: rank must lie in [1, dim]");
  }
  Rng rng(seed);
  const auto n = static_cast<Eigen::Index>(dim);
  const auto r = static_cast<Eigen::Index>(rank);
  Matrix g(n, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.complex_normal();
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator::unchecked(std::move(rho), CompositeDims{dim});
}

StateVector random_state(std::size_t dim, Seed seed) {
  if (dim < 1) throw DimensionError("random_state: dim must be >= 1");
  Rng rng(seed);
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  return StateVector::normalized(std::move(v));
}

}  // namespace qrepeat
