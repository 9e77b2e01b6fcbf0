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


#include "qrepeat/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qrepeat {
namespace {

// Phase convention for vectors known only up to a phase: the first
// component of size at least half the uniform amplitude is real positive.
Vector fix_phase(Vector a) {
  const double floor = 0.5 / std::sqrt(static_cast<double>(a.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i)) > floor) {
      a *= std::conj(a(i)) / std::abs(a(i));
      break;
    }
  }
  return a;
}

// (<x| (x) 1) psi  or  (1 (x) <x|) psi  on a two-factor vector.
Vector contract_first(const Vector& psi, const Vector& x, std::size_t da) {
  const auto a = static_cast<Eigen::Index>(da);
  Vector out = Vector::Zero(a);
  for (Eigen::Index s = 0; s < x.size(); ++s) out += std::conj(x(s)) * psi.segment(s * a, a);
  return out;
}

Vector contract_second(const Vector& psi, const Vector& x) {
  const Eigen::Index a = x.size();
  const Eigen::Index ds = psi.size() / a;
  Vector out(ds);
  for (Eigen::Index s = 0; s < ds; ++s) out(s) = x.dot(psi.segment(s * a, a));
  return out;
}

struct CopiedBranch {
  Vector system;  // u~
  Vector tag;     // A_u
  double residual = 0.0;
};

CopiedBranch copy_strict(const Vector& psi, const StateVector& x, std::size_t da) {
  const CompositeDims sa{x.dim(), da};
  const std::size_t keep_s[] = {0};
  const Matrix sys = partial_trace(Matrix(psi * psi.adjoint()), sa, keep_s);
  return {x.amplitudes(), contract_first(psi, x.amplitudes(), da),
          hs_distance(sys, x.projector())};
}

CopiedBranch copy_in_records(const Vector& psi, const StateVector& x, std::size_t da,
                             const RecordDecomposition& records) {
  const CompositeDims sa{x.dim(), da};
  const std::size_t keep_s[] = {0};
  const std::size_t keep_a[] = {1};
  const Matrix rho = psi * psi.adjoint();
  const Matrix sys = partial_trace(rho, sa, keep_s);
  const Matrix app = partial_trace(rho, sa, keep_a);
  double residual = hs_distance(rho, kron(sys, app));
  const Matrix before = x.projector();
  for (std::size_t k = 0; k < records.size(); ++k) {
    const double drift = hs_inner(records.projector(k), sys) - hs_inner(records.projector(k), before);
    residual = std::max(residual, std::abs(drift));
  }
  const HermitianEigen e = hermitian_eigen(app);
  const Vector tag = fix_phase(e.vectors.col(e.vectors.cols() - 1));
  return {contract_second(psi, tag), tag, residual};
}

double product_form_residual(const DensityOperator& rho) {
  const CompositeDims& dims = rho.dims();
  Matrix prod = Matrix::Identity(1, 1);
  for (std::size_t f = 0; f < dims.factors(); ++f) {
    const std::size_t keep[] = {f};
    prod = kron(prod, partial_trace(rho.matrix(), dims, keep));
  }
  return hs_distance(rho.matrix(), prod);
}

Matrix factor_marginal(const DensityOperator& rho, std::size_t f) {
  const std::size_t keep[] = {f};
  return partial_trace(rho.matrix(), rho.dims(), keep);
}

}  // namespace

IdentityReport IdentityReport::compare(Complex lhs, Complex rhs, double tol) {
  const double r = std::abs(lhs - rhs);
  return {lhs, rhs, r, r < tol};
}

// ---- scalar products -------------------------------------------------------------

ScalarProductReport verify_scalar_product_identity(const StateVector& u, const StateVector& v,
                                                   const UnitaryOperator& copy_unitary,
                                                   const StateVector& ready,
                                                   const std::optional<RecordDecomposition>& records) {
  if (u.dim() != v.dim()) throw DimensionError("scalar product identity: originals differ in dimension");
  const std::size_t ds = u.dim();
  const std::size_t da = ready.dim();
  if (copy_unitary.dim() != ds * da) {
    throw DimensionError("scalar product identity: copy unitary must act on S (x) A");
  }
  if (records && records->dim() != ds) {
    throw DimensionError("scalar product identity: record decomposition is not on S");
  }
  const Vector psi_u = copy_unitary.matrix() * kron(u.amplitudes(), ready.amplitudes());
  const Vector psi_v = copy_unitary.matrix() * kron(v.amplitudes(), ready.amplitudes());

  const CopiedBranch bu = records ? copy_in_records(psi_u, u, da, *records) : copy_strict(psi_u, u, da);
  const CopiedBranch bv = records ? copy_in_records(psi_v, v, da, *records) : copy_strict(psi_v, v, da);

  ScalarProductReport r;
  r.repeatability_residual = std::max(bu.residual, bv.residual);
  if (!(r.repeatability_residual < kTolAlg)) {
    throw RepeatabilityViolation(
        std::string("copy unitary is not repeatable on the originals (residual ") +
        std::to_string(r.repeatability_residual) + ")",
        r.repeatability_residual);
  }
  r.system_overlap = u.inner(v);
  r.tag_overlap = bu.tag.dot(bv.tag);
  r.identity = IdentityReport::compare(r.system_overlap, bu.system.dot(bv.system) * r.tag_overlap);
  r.originals_orthogonal = std::abs(r.system_overlap) < kTolAlg;
  r.tags_identical = std::abs(r.tag_overlap - 1.0) < kTolAlg;
  r.dichotomy = r.originals_orthogonal || r.tags_identical;
  return r;
}

// ---- mixed originals -------------------------------------------------------------

RecordOrthogonalityReport verify_record_orthogonality(const DensityOperator& rho_u,
                                                      const DensityOperator& rho_v,
                                                      const ChainRun& run_u,
                                                      const ChainRun& run_v) {
  if (run_u.layout != run_v.layout || run_u.apparatus_count != run_v.apparatus_count ||
      run_u.steps.size() != run_v.steps.size()) {
    throw PreconditionError("record orthogonality: mismatched chains");
  }
  if (run_u.steps.size() != run_u.apparatus_count) {
    throw PreconditionError("record orthogonality: chain runs are incomplete");
  }
  if (rho_u.dim() != rho_v.dim() || run_u.layout.empty() || rho_u.dim() != run_u.layout[0]) {
    throw DimensionError("record orthogonality: originals do not live on the chain's S factor");
  }
  if (hs_distance(factor_marginal(run_u.initial, 0), rho_u.matrix()) >= kTolAlg ||
      hs_distance(factor_marginal(run_v.initial, 0), rho_v.matrix()) >= kTolAlg) {
    throw PreconditionError("record orthogonality: chain runs do not start from the originals");
  }

  RecordOrthogonalityReport r;
  r.system_overlap = hs_inner(rho_u, rho_v);
  double accumulated = 1.0;
  for (std::size_t n = 0; n < run_u.steps.size(); ++n) {
    const DensityOperator& su = run_u.steps[n];
    const DensityOperator& sv = run_v.steps[n];
    if (product_form_residual(su) >= kTolAlg || product_form_residual(sv) >= kTolAlg) {
      throw PreconditionError("record orthogonality: copy output is not a product of S and records");
    }
    const std::size_t f = n + 1;
    accumulated *= hs_inner(factor_marginal(su, f), factor_marginal(sv, f));
    const double rhs = hs_inner(factor_marginal(su, 0), factor_marginal(sv, 0)) * accumulated;
    r.steps.push_back(IdentityReport::compare(r.system_overlap, rhs));
  }
  const DensityOperator& fu = run_u.final_state();
  const DensityOperator& fv = run_v.final_state();
  bool distinguishable = false;
  for (std::size_t k = 0; k < run_u.apparatus_count; ++k) {
    const double ov = hs_inner(factor_marginal(fu, k + 1), factor_marginal(fv, k + 1));
    r.record_overlaps.push_back(ov);
    distinguishable = distinguishable || ov < 1.0 - kTolAlg;
  }
  r.dichotomy = !distinguishable || r.system_overlap < kTolAlg;
  r.satisfied = r.dichotomy && std::all_of(r.steps.begin(), r.steps.end(),
                                           [](const IdentityReport& s) { return s.satisfied; });
  return r;
}

// ---- actionability ---------------------------------------------------------------

const char* status_name(ActionabilityStatus s) {
  switch (s) {
    case ActionabilityStatus::actionable:
      return "actionable";
    case ActionabilityStatus::not_actionable:
      return "not_actionable";
    case ActionabilityStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

ActionabilityEvaluator::ActionabilityEvaluator(const DensityOperator& composite_u,
                                               const DensityOperator& composite_v, std::size_t k,
                                               std::size_t test_dim,
                                               const std::optional<DensityOperator>& tau0)
    : dims_(composite_u.dims()), k_(k), test_dim_(test_dim) {
  if (composite_u.dims() != composite_v.dims()) {
    throw DimensionError("actionability: composites have different layouts");
  }
  dims_.check_index(k);
  if (test_dim < 2) throw PreconditionError("actionability: test system needs dim >= 2");
  if (tau0) {
    if (tau0->dim() != test_dim) throw DimensionError("actionability: tau_0 has the wrong dimension");
    tau0_ = tau0->matrix();
  } else {
    const auto t = static_cast<Eigen::Index>(test_dim);
    tau0_ = Matrix::Zero(t, t);
    tau0_(0, 0) = 1.0;
  }
  overlap_before_ = hs_inner(composite_u, composite_v);
  rest_ = dims_.total() / dims_[k];
  block_ = dims_[k] * test_dim;
  u_ = prepare(composite_u);
  v_ = prepare(composite_v);
}

ActionabilityEvaluator::Branch ActionabilityEvaluator::prepare(const DensityOperator& c) const {
  std::vector<std::size_t> order;
  for (std::size_t f = 0; f < dims_.factors(); ++f) {
    if (f != k_) order.push_back(f);
  }
  order.push_back(k_);
  const Matrix initial = kron(permute_factors(c.matrix(), dims_, order), tau0_);
  const HermitianEigen eig = hermitian_eigen(initial);
  // Eigenvalues below 1e-13 are round-off of an exactly low-rank state.
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > 1e-13) kept.push_back(i);
  }
  Branch b{Matrix(initial.rows(), static_cast<Eigen::Index>(kept.size()))};
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const auto i = kept[r];
    b.psi.col(static_cast<Eigen::Index>(r)) = std::sqrt(eig.values(i)) * eig.vectors.col(i);
  }
  return b;
}

ActionabilityEvaluator::Outcome ActionabilityEvaluator::evolve(const Branch& b, const Matrix& u,
                                                              std::vector<double>* components) const {
  const auto m = static_cast<Eigen::Index>(block_);
  const auto t = static_cast<Eigen::Index>(test_dim_);
  const Eigen::Index n = b.psi.rows();
  const Eigen::Index x = n / t;  // everything but T
  const Eigen::Index rank = b.psi.cols();
  // Row i*m + j of Psi is (rest i, block j): viewed as m x (rest * rank), the
  // block unitary acts by left multiplication.
  Matrix phi(n, rank);
  Eigen::Map<Matrix>(phi.data(), m, n / m * rank).noalias() =
      u * Eigen::Map<const Matrix>(b.psi.data(), m, n / m * rank);
  Matrix out(n, n);
  out.noalias() = phi * phi.adjoint();

  // Global index = x * t + b.
  Outcome o;
  o.tau = Matrix::Zero(t, t);
  o.rest = Matrix::Zero(x, x);
  for (Eigen::Index c = 0; c < x; ++c) {
    for (Eigen::Index r = 0; r < x; ++r) {
      Complex tr = 0.0;
      for (Eigen::Index k = 0; k < t; ++k) tr += out(r * t + k, c * t + k);
      o.rest(r, c) = tr;
    }
    o.tau += out.block(c * t, c * t, t, t);
  }
  double dist2 = 0.0;
  for (Eigen::Index c = 0; c < x; ++c) {
    for (Eigen::Index r = 0; r < x; ++r) {
      const Complex w = o.rest(r, c);
      for (Eigen::Index j = 0; j < t; ++j) {
        for (Eigen::Index i = 0; i < t; ++i) {
          const Complex d = out(r * t + i, c * t + j) - w * o.tau(i, j);
          dist2 += std::norm(d);
          if (components) {
            components->push_back(d.real());
            components->push_back(d.imag());
          }
        }
      }
    }
  }
  o.residual = std::sqrt(dist2);
  return o;
}

Evaluation ActionabilityEvaluator::operator()(const UnitaryOperator& u) const {
  if (u.dim() != block_) throw DimensionError("actionability: unitary must act on A^(k) (x) T");
  const Outcome ou = evolve(u_, u.matrix());
  const Outcome ov = evolve(v_, u.matrix());
  const double drift = std::abs(hs_inner(ou.rest, ov.rest) - overlap_before_);
  return {hs_inner(tau0_, tau0_) - hs_inner(ou.tau, ov.tau),
          {ou.residual, ov.residual, drift}};
}

RealVector ActionabilityEvaluator::components(const UnitaryOperator& u) const {
  if (u.dim() != block_) throw DimensionError("actionability: unitary must act on A^(k) (x) T");
  std::vector<double> c;
  const Outcome ou = evolve(u_, u.matrix(), &c);
  const Outcome ov = evolve(v_, u.matrix(), &c);
  c.push_back(hs_inner(ou.rest, ov.rest) - overlap_before_);
  return Eigen::Map<const RealVector>(c.data(), static_cast<Eigen::Index>(c.size()));
}

const std::vector<std::string>& ActionabilityEvaluator::residual_names() {
  static const std::vector<std::string> names = {"product_u", "product_v", "control_drift"};
  return names;
}

ActionabilityVerdict actionability_test(const DensityOperator& composite_u,
                                        const DensityOperator& composite_v, std::size_t k,
                                        std::size_t test_dim, const OptimizationConfig& config,
                                        const std::optional<DensityOperator>& tau0) {
  const ActionabilityEvaluator evaluator(composite_u, composite_v, k, test_dim, tau0);
  SearchProblem problem;
  problem.dim = evaluator.unitary_dim();
  problem.residual_names = ActionabilityEvaluator::residual_names();
  problem.evaluate = [&](const UnitaryOperator& u) { return evaluator(u); };
  problem.components = [&](const UnitaryOperator& u) { return evaluator.components(u); };

  ActionabilityVerdict v;
  v.search = maximize(problem, config);
  v.best_score = v.search.objective;
  const NamedValues& res = v.search.constraint_residuals;
  v.product_residual = std::max(res[0].second, res[1].second);
  v.control_drift = res[2].second;
  v.witness_unitary = UnitaryOperator::unchecked(v.search.best_unitary().matrix(),
                                                 CompositeDims{composite_u.dims()[k], test_dim});
  v.trials = v.search.restarts_run;
  const bool feasible = v.product_residual < kTolProduct && v.control_drift < kTolProduct;
  v.actionable = v.best_score > kThresholdActionable && feasible;
  if (!feasible) {
    v.status = ActionabilityStatus::inconclusive;
  } else {
    v.status = v.actionable ? ActionabilityStatus::actionable : ActionabilityStatus::not_actionable;
  }
  v.system_overlap =
      hs_inner(factor_marginal(composite_u, 0), factor_marginal(composite_v, 0));
  v.orthogonality_consistent = !v.actionable || v.system_overlap < kTolAlg;
  return v;
}

bool is_trivial_mixture(std::pair<double, double> ab, std::pair<double, double> cd, double tol) {
  auto near = [tol](std::pair<double, double> p, double x, double y) {
    return std::abs(p.first - x) < tol && std::abs(p.second - y) < tol;
  };
  return (near(ab, 1, 0) && near(cd, 0, 1)) || (near(ab, 0, 1) && near(cd, 1, 0));
}

ActionabilityVerdict mixtures_dont_mix_check(const DensityOperator& rho_u,
                                             const DensityOperator& rho_v,
                                             std::pair<double, double> ab,
                                             std::pair<double, double> cd,
                                             const OptimizationConfig& config) {
  if (rho_u.dims() != rho_v.dims()) throw DimensionError("mixtures: records differ in layout");
  if (!(hs_inner(rho_u, rho_v) < kTolAlg)) {
    throw PreconditionError("mixtures: records must have orthogonal supports");
  }
  for (const auto& [x, y] : {ab, cd}) {
    if (!(x >= 0.0 && y >= 0.0) || std::abs(x + y - 1.0) >= kTolAlg) {
      throw PreconditionError("mixtures: coefficients must be non-negative and sum to 1");
    }
  }
  const DensityOperator mix_ab =
      DensityOperator::unchecked(ab.first * rho_u.matrix() + ab.second * rho_v.matrix(), rho_u.dims());
  const DensityOperator mix_cd =
      DensityOperator::unchecked(cd.first * rho_u.matrix() + cd.second * rho_v.matrix(), rho_u.dims());
  return actionability_test(mix_ab, mix_cd, 0, 2, config);
}

// ---- purifications ---------------------------------------------------------------

namespace {

// Columns w_k = (1 (x) <b_k|) Gamma for the purifier basis b (columns).
Matrix branch_vectors(const Matrix& coeff, const Matrix& basis) { return coeff * basis.conjugate(); }

double off_diagonal(const Matrix& gram) {
  Matrix g = gram;
  g.diagonal().setZero();
  return max_abs(g);
}

}  // namespace

PurifiedOrthogonalityReport purified_orthogonality(const StateVector& gamma_u,
                                                   const StateVector& gamma_v) {
  const CompositeDims& dims = gamma_u.dims();
  if (dims.factors() != 2 || gamma_v.dims() != dims) {
    throw DimensionError("purified orthogonality: states must live on the same S (x) S'");
  }
  const auto ds = static_cast<Eigen::Index>(dims[0]);
  const auto dp = static_cast<Eigen::Index>(dims[1]);
  // Row-major reshape: coeff(i, j) = <i j|Gamma>.
  const Matrix cu = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(gamma_u.amplitudes().data(), ds, dp);
  const Matrix cv = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(gamma_v.amplitudes().data(), ds, dp);

  // Right singular vectors V_k give Gamma = sum_k s_k |U_k> (x) conj|V_k>.
  std::optional<Matrix> basis;
  for (const Matrix* c : {&cu, &cv}) {
    Eigen::JacobiSVD<Matrix> svd(*c, Eigen::ComputeFullV);
    const Matrix candidate = svd.matrixV().conjugate();
    const Matrix wu = branch_vectors(cu, candidate);
    const Matrix wv = branch_vectors(cv, candidate);
    if (off_diagonal(wu.adjoint() * wu) < kTolAlg && off_diagonal(wv.adjoint() * wv) < kTolAlg) {
      basis = candidate;
      break;
    }
  }
  if (!basis) throw PreconditionError("purified orthogonality: mismatched purifier bases");

  const Matrix wu = branch_vectors(cu, *basis);
  const Matrix wv = branch_vectors(cv, *basis);
  PurifiedOrthogonalityReport r;
  Complex sum = 0.0;
  for (Eigen::Index k = 0; k < dp; ++k) {
    r.terms.push_back(wu.col(k).dot(wv.col(k)));
    sum += r.terms.back();
  }
  r.identity = IdentityReport::compare(gamma_u.inner(gamma_v), sum);
  r.orthogonal = std::abs(r.identity.lhs) < kTolAlg;
  return r;
}

BellDemoReport bell_phase_demo(const OptimizationConfig& config) {
  const double h = 1.0 / std::sqrt(2.0);
  Vector plus = Vector::Zero(4);
  Vector minus = Vector::Zero(4);
  plus << h, 0, 0, h;
  minus << h, 0, 0, -h;
  const StateVector g_plus(plus, CompositeDims{2, 2});
  const StateVector g_minus(minus, CompositeDims{2, 2});

  const Matrix p0 = g_plus.projector();
  const RecordDecomposition records({p0, Matrix::Identity(4, 4) - p0}, {0.0, 1.0});
  const TagSpec tags{StateVector::basis(2, 0), {StateVector::basis(2, 0), StateVector::basis(2, 1)}};
  const UnitaryOperator copy = build_controlled_copy(records, tags);

  const CompositeDims layout{2, 2, 2};
  auto composite = [&](const StateVector& g) {
    const Vector psi = copy.matrix() * kron(g.amplitudes(), tags.ready.amplitudes());
    return DensityOperator::unchecked(psi * psi.adjoint(), layout);
  };
  const DensityOperator c_plus = composite(g_plus);
  const DensityOperator c_minus = composite(g_minus);

  BellDemoReport r;
  const DensityOperator bp = DensityOperator::pure(g_plus);
  const DensityOperator bm = DensityOperator::pure(g_minus);
  r.reduced_overlap_before = hs_inner(partial_trace(bp, {0}), partial_trace(bm, {0}));
  const Matrix sp = factor_marginal(c_plus, 0);
  const Matrix sm = factor_marginal(c_minus, 0);
  r.reduced_overlap_after = hs_inner(sp, sm);
  r.reduced_state_distance = hs_distance(sp, sm);
  r.global_overlap = std::abs(g_plus.inner(g_minus));
  r.tag_overlap = hs_inner(factor_marginal(c_plus, 2), factor_marginal(c_minus, 2));
  r.global_record = actionability_test(c_plus, c_minus, 2, 2, config);
  r.local_record = actionability_test(c_plus, c_minus, 0, 2, config);
  return r;
}

}  // namespace qrepeat
