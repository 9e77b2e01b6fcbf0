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

// Numerical checks of the record/repeatability theorems: scalar-product
// preservation under repeatable copying, record bookkeeping for mixed
// originals, actionability of records against a test system, the no-go for
// mixtures of actionable records, and orthogonality of purifications.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrepeat/copy_dynamics.hpp"
#include "qrepeat/hilbert.hpp"
#include "qrepeat/optimizer.hpp"

namespace qrepeat {

// Minimum Tr(tau_0^2) - Tr(tau_u tau_v) for a record to count as actionable.
inline constexpr double kThresholdActionable = 0.1;
// HS distance from product form tolerated on the witness outputs.
inline constexpr double kTolProduct = 1e-6;
// Bound on scores reported by searches the theory says must fail.
inline constexpr double kTolOptimizer = 1e-6;

// The copy unitary does not leave the originals where repeatability requires.
// Distinct from a failed identity: the inputs are outside the theorem.
class RepeatabilityViolation : public PreconditionError {
 public:
  RepeatabilityViolation(const std::string& what, double residual)
      : PreconditionError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct IdentityReport {
  Complex lhs;
  Complex rhs;
  double residual = 0.0;  // |lhs - rhs|
  bool satisfied = false;  // residual < tol

  static IdentityReport compare(Complex lhs, Complex rhs, double tol = kTolAlg);
};

struct ScalarProductReport {
  IdentityReport identity;  // <u|v> against <u~|v~><A_u|A_v>
  Complex system_overlap;   // <u|v>
  Complex tag_overlap;      // <A_u|A_v>
  bool originals_orthogonal = false;
  bool tags_identical = false;
  // Either the originals are orthogonal or the tags coincide.
  bool dichotomy = false;
  // Strict mode: HS distance of post-copy S states from |u><u|, |v><v|.
  // Records mode: largest change of a record-subspace population.
  double repeatability_residual = 0.0;
};

// Runs |x>|ready> -> V |x>|ready> for x = u, v on S (x) A and checks
// <u|v> = <u~|v~><A_u|A_v>.
//
// Without `records` the copy must leave u and v untouched on S (u~ = u).
// With `records` the originals may be rotated inside their record subspace:
// the output only has to be a product whose record populations equal the
// input's. Throws RepeatabilityViolation otherwise.
ScalarProductReport verify_scalar_product_identity(
    const StateVector& u, const StateVector& v, const UnitaryOperator& copy_unitary,
    const StateVector& ready, const std::optional<RecordDecomposition>& records = std::nullopt);

struct RecordOrthogonalityReport {
  // Entry n compares Tr(rho_u rho_v) with Tr(rho_u^(n) rho_v^(n)) times the
  // product of the first n record overlaps, rho^(n) being the S state after
  // n copy steps.
  std::vector<IdentityReport> steps;
  std::vector<double> record_overlaps;  // Tr(rec_u rec_v) per apparatus
  double system_overlap = 0.0;          // Tr(rho_u rho_v)
  // Distinguishable first records imply orthogonal originals.
  bool dichotomy = false;
  bool satisfied = false;
};

// Both runs must come from run_copy_chain on the same chain, starting from
// rho_u and rho_v. Throws PreconditionError for mismatched chains and when an
// intermediate state is not a product of S with the records (originals
// straddling record subspaces).
RecordOrthogonalityReport verify_record_orthogonality(const DensityOperator& rho_u,
                                                      const DensityOperator& rho_v,
                                                      const ChainRun& run_u,
                                                      const ChainRun& run_v);

enum class ActionabilityStatus { actionable, not_actionable, inconclusive };
const char* status_name(ActionabilityStatus s);

struct ActionabilityVerdict {
  // Raw Tr(tau_0^2) - Tr(tau_u tau_v) at the best penalized point.
  double best_score = 0.0;
  // Larger of the two branches' distances from product form.
  double product_residual = 0.0;
  // |Tr(rest_u rest_v) after - before|: how far the record failed to act as
  // an undisturbed control (the rest is everything except T).
  double control_drift = 0.0;
  UnitaryOperator witness_unitary = UnitaryOperator::identity(1);
  bool actionable = false;
  int trials = 0;
  ActionabilityStatus status = ActionabilityStatus::not_actionable;
  SearchResult search;
  // Tr of the factor-0 reductions of the two composites.
  double system_overlap = 0.0;
  // False only when actionable records sit on overlapping factor-0 states.
  bool orthogonality_consistent = true;
};

// Scores a unitary on A^(k) (x) T for a pair of composites extended by a test
// system T in tau_0. Residuals: the two product-form distances
// ||rho_out - rho_rest (x) tau||_HS (rest = everything except T), and
// sqrt|Tr(rest_u rest_v) - Tr(rho_u rho_v)|. Product form alone admits
// couplings that move the record into T (a swap); requiring the overlap of
// the rest to survive is what makes the record act as a control.
class ActionabilityEvaluator {
 public:
  ActionabilityEvaluator(const DensityOperator& composite_u, const DensityOperator& composite_v,
                         std::size_t k, std::size_t test_dim,
                         const std::optional<DensityOperator>& tau0 = std::nullopt);

  std::size_t unitary_dim() const { return block_; }
  Evaluation operator()(const UnitaryOperator& u) const;
  // Entries of both branches' product-form defects (re, im), then the signed
  // drift: all zero exactly where the residuals are.
  RealVector components(const UnitaryOperator& u) const;

  static const std::vector<std::string>& residual_names();

 private:
  // Initial state (factor k moved last, then (x) tau_0) as Psi Psi^dag with
  // Psi of low rank; evolving is then a single U * Psi product.
  struct Branch {
    Matrix psi;  // (rest * dim(A^(k)) * test_dim) x rank
  };
  Branch prepare(const DensityOperator& composite) const;
  struct Outcome {
    double residual = 0.0;
    Matrix rest;
    Matrix tau;
  };
  Outcome evolve(const Branch& b, const Matrix& u, std::vector<double>* components = nullptr) const;

  CompositeDims dims_;
  std::size_t k_ = 0;
  std::size_t test_dim_ = 0;
  std::size_t rest_ = 0;   // product of the factors other than k
  std::size_t block_ = 0;  // dim(A^(k)) * test_dim
  Matrix tau0_;
  double overlap_before_ = 0.0;
  Branch u_;
  Branch v_;
};

// Searches unitaries on factor k of the composites (x) T for one that makes
// T's final state depend on the branch while leaving T in product with
// everything else and the overlap of everything else unchanged.
// `inconclusive` when the best point misses either constraint by kTolProduct
// or more.
ActionabilityVerdict actionability_test(const DensityOperator& composite_u,
                                        const DensityOperator& composite_v, std::size_t k,
                                        std::size_t test_dim, const OptimizationConfig& config,
                                        const std::optional<DensityOperator>& tau0 = std::nullopt);

// Actionability of a rho_u + b rho_v against c rho_u + d rho_v for records
// rho_u, rho_v with orthogonal supports, probed with a test qubit. Throws
// PreconditionError for overlapping records or coefficients that are negative
// or do not sum to one.
ActionabilityVerdict mixtures_dont_mix_check(const DensityOperator& rho_u,
                                             const DensityOperator& rho_v,
                                             std::pair<double, double> ab,
                                             std::pair<double, double> cd,
                                             const OptimizationConfig& config);

// ((1,0),(0,1)) or ((0,1),(1,0)): the mixtures are the records themselves.
bool is_trivial_mixture(std::pair<double, double> ab, std::pair<double, double> cd,
                        double tol = kTolAlg);

struct PurifiedOrthogonalityReport {
  IdentityReport identity;  // <G_u|G_v> against sum_k s_k^u s_k^v <sigma_k^u|sigma_k^v>
  std::vector<Complex> terms;
  // <G_u|G_v> = 0: the originals can be told apart by a copy.
  bool orthogonal = false;
};

// Writes both states as sum_k s_k |sigma_k> (x) |b_k> over a common
// orthonormal purifier basis {b_k} on S' and compares the direct overlap with
// the term-wise sum. Throws PreconditionError("mismatched purifier bases")
// when no such common basis exists.
PurifiedOrthogonalityReport purified_orthogonality(const StateVector& gamma_u,
                                                   const StateVector& gamma_v);

struct BellDemoReport {
  double reduced_overlap_before = 0.0;  // Tr(rho_+^S rho_-^S) before the copy
  double reduced_overlap_after = 0.0;
  double reduced_state_distance = 0.0;  // ||rho_+^S - rho_-^S||_HS
  double global_overlap = 0.0;          // |<g+|g->|
  double tag_overlap = 0.0;             // Tr(rho_A^+ rho_A^-)
  ActionabilityVerdict global_record;   // on A
  ActionabilityVerdict local_record;    // on S alone
};

// Bell pair g+- on S (x) S' copied into a qubit apparatus by a unitary
// controlled on the global Bell projector.
BellDemoReport bell_phase_demo(const OptimizationConfig& config);

}  // namespace qrepeat
