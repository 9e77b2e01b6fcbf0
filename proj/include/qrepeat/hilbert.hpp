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

#pragma once

// Dense linear algebra for finite-dimensional multipartite quantum systems.
//
// Tensor factors are indexed left to right as listed in CompositeDims; the
// first factor is the most significant digit of a composite basis index.
// Every reduction keeps the relative order of the surviving factors.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qrepeat/errors.hpp"
#include "qrepeat/rng.hpp"

namespace qrepeat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Absolute tolerance for algebraic identities.
inline constexpr double kTolAlg = 1e-9;

class CompositeDims {
 public:
  CompositeDims() = default;
  explicit CompositeDims(std::vector<std::size_t> dims);
  CompositeDims(std::initializer_list<std::size_t> dims)
      : CompositeDims(std::vector<std::size_t>(dims)) {}

  std::size_t factors() const { return dims_.size(); }
  std::size_t operator[](std::size_t i) const { return dims_.at(i); }
  std::size_t total() const { return total_; }
  const std::vector<std::size_t>& list() const { return dims_; }
  bool empty() const { return dims_.empty(); }

  CompositeDims concat(const CompositeDims& other) const;
  // Factors at the given (valid, strictly increasing) positions.
  CompositeDims select(std::span<const std::size_t> indices) const;
  // Throws DimensionError unless idx < factors().
  void check_index(std::size_t idx) const;

  friend bool operator==(const CompositeDims&, const CompositeDims&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

class StateVector {
 public:
  // Throws InvariantError unless the norm is 1 within kTolAlg.
  StateVector(Vector amplitudes, CompositeDims dims);
  explicit StateVector(Vector amplitudes);

  // Rescales to unit norm; throws InvariantError for the zero vector.
  static StateVector normalized(Vector amplitudes, CompositeDims dims);
  static StateVector normalized(Vector amplitudes);
  static StateVector basis(std::size_t dim, std::size_t index);

  const Vector& amplitudes() const { return amplitudes_; }
  const CompositeDims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

  // <this|other>
  Complex inner(const StateVector& other) const;
  Matrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  Vector amplitudes_;
  CompositeDims dims_;
};

class UnitaryOperator;

class DensityOperator {
 public:
  // Validates Hermiticity, unit trace and positivity (all within kTolAlg).
  // Eigenvalues in (-kTolAlg, 0) are clipped to zero and the operator is
  // renormalized; anything more negative throws InvariantError.
  DensityOperator(Matrix matrix, CompositeDims dims);
  explicit DensityOperator(const Matrix& matrix);

  static DensityOperator pure(const StateVector& psi);
  static DensityOperator maximally_mixed(std::size_t dim);
  // Skips validation. For operators that are density operators by
  // construction (unitary images, reductions of valid states).
  static DensityOperator unchecked(Matrix matrix, CompositeDims dims);

  const Matrix& matrix() const { return matrix_; }
  const CompositeDims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  double purity() const;
  // Ascending.
  RealVector eigenvalues() const;
  DensityOperator evolve(const UnitaryOperator& u) const;

 private:
  struct NoCheck {};
  DensityOperator(NoCheck, Matrix matrix, CompositeDims dims);

  Matrix matrix_;
  CompositeDims dims_;
};

class UnitaryOperator {
 public:
  // Throws InvariantError unless max|U^dag U - 1| < kTolAlg.
  UnitaryOperator(Matrix matrix, CompositeDims dims);
  explicit UnitaryOperator(const Matrix& matrix);

  static UnitaryOperator identity(std::size_t dim);
  static UnitaryOperator identity(const CompositeDims& dims);
  static UnitaryOperator unchecked(Matrix matrix, CompositeDims dims);

  const Matrix& matrix() const { return matrix_; }
  const CompositeDims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  UnitaryOperator adjoint() const;
  StateVector apply(const StateVector& psi) const;
  // Largest entry of |U^dag U - 1|.
  double unitarity_residual() const;

  friend UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b);

 private:
  struct NoCheck {};
  UnitaryOperator(NoCheck, Matrix matrix, CompositeDims dims);

  Matrix matrix_;
  CompositeDims dims_;
};

struct SchmidtDecomposition {
  RealVector coefficients;  // nonincreasing, strictly positive
  std::vector<StateVector> left_basis;
  std::vector<StateVector> right_basis;

  std::size_t rank() const { return static_cast<std::size_t>(coefficients.size()); }
  // sum_k s_k |left_k> (x) |right_k>
  Vector reconstruct() const;
};

// ---- elementary matrix helpers -------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);
double max_abs(const Matrix& m);
double hermiticity_residual(const Matrix& m);
Matrix commutator(const Matrix& a, const Matrix& b);
// Frobenius norm of a - b.
double hs_distance(const Matrix& a, const Matrix& b);
// Re Tr(a b) for Hermitian b.
double hs_inner(const Matrix& a, const Matrix& b);

// Reorders tensor factors: factor i of the result is factor order[i] of the
// input.
Matrix permute_factors(const Matrix& op, const CompositeDims& dims,
                       std::span<const std::size_t> order);
Vector permute_factors(const Vector& psi, const CompositeDims& dims,
                       std::span<const std::size_t> order);

// Lifts an operator acting on the listed factors (in listed order) to the
// full composite, acting as identity elsewhere.
Matrix embed(const Matrix& op, const CompositeDims& dims,
             std::span<const std::size_t> targets);

// Raw reduction used inside optimizer loops.
Matrix partial_trace(const Matrix& op, const CompositeDims& dims,
                     std::span<const std::size_t> keep);

// ---- operations ------------------------------------------------------------

StateVector tensor_product(const StateVector& a, const StateVector& b);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);
UnitaryOperator tensor_product(const UnitaryOperator& a, const UnitaryOperator& b);

// Reduction onto the factors in `keep` (any order on input; the result keeps
// them in ascending order). Throws DimensionError for empty, duplicate or
// out-of-range indices.
DensityOperator partial_trace(const DensityOperator& rho,
                              std::span<const std::size_t> keep);
DensityOperator partial_trace(const DensityOperator& rho,
                              std::initializer_list<std::size_t> keep);

// Tr(rho sigma).
double hs_inner(const DensityOperator& rho, const DensityOperator& sigma);

// Same quantity as hs_inner; zero exactly when the supports are orthogonal.
double support_overlap(const DensityOperator& rho, const DensityOperator& sigma);

// Uhlmann fidelity (Tr|sqrt(rho) sqrt(sigma)|)^2.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);
double fidelity(const Matrix& rho, const Matrix& sigma);

// Splits psi into the factors in `left` versus the rest. Degenerate
// coefficients are ordered by the position of the first nonzero amplitude of
// their left vector; each left vector has its first nonzero amplitude real and
// positive.
SchmidtDecomposition schmidt_decompose(const StateVector& psi,
                                       std::span<const std::size_t> left);
SchmidtDecomposition schmidt_decompose(const StateVector& psi,
                                       std::initializer_list<std::size_t> left);

// Canonical purification sum_k sqrt(l_k) |e_k> (x) conj|e_k> on d (x) d.
StateVector purify(const DensityOperator& rho);
// Purification sum_k sqrt(l_k) |e_k> (x) |b_k> with eigenvalues in
// nonincreasing order matched to the columns of `purifier_basis`.
StateVector purify_in_basis(const DensityOperator& rho, const Matrix& purifier_basis);

// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
// R's diagonal folded back into Q.
UnitaryOperator random_unitary(std::size_t dim, Seed seed);
// G G^dag / Tr(G G^dag) for a dim x rank complex Ginibre G.
DensityOperator random_density(std::size_t dim, std::size_t rank, Seed seed);
StateVector random_state(std::size_t dim, Seed seed);

// Eigen-decomposition of a Hermitian matrix (eigenvalues ascending).
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};
HermitianEigen hermitian_eigen(const Matrix& m);

}  // namespace qrepeat
