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

// Search over the unitary group.
//
// Unitaries are parameterized as U = exp(i H) with H expanded in a fixed
// Hermitian basis (identity, then generalized Gell-Mann matrices). maximize()
// runs independent Nelder-Mead searches from Gaussian starting points on the
// penalized merit  objective - penalty_weight * sum(residuals)  and keeps the
// best one. Residuals are expected to scale like a norm of the constraint
// violation (not its square) so the penalty is exact for a large enough
// weight. Such exact penalties carve narrow ridges the simplex cannot follow,
// so even-numbered restarts first climb with softened weights (continuation);
// odd-numbered ones start at the full weight. Every restart then re-launches
// from its best point. The identity coupling is always a candidate as well.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qrepeat/hilbert.hpp"

namespace qrepeat {

struct OptimizationConfig {
  int restarts = 64;
  int max_iterations = 2000;
  Seed seed = 0;
  double penalty_weight = 1e3;
  double convergence_tol = 1e-10;
  double step_init = 0.5;
  // Each restart re-launches the simplex from its own best point up to this
  // many times (stopping early once a relaunch no longer improves), which
  // undoes premature simplex collapse. 0 disables.
  int refinements = 2;
  // Even restarts: before the full penalty weight, run one shorter, looser
  // simplex search at each of penalty_weight * 10^-stages, ..., 10^-1.
  int continuation_stages = 3;
  // Finally try to restore feasibility of the winning point (needs
  // SearchProblem::components); kept only when the merit improves.
  bool polish = true;

  // Throws PreconditionError unless every numeric field is positive (refinements and continuation_stages may be 0).
  void validate() const;
};

struct UnitaryParameterization {
  std::size_t dim = 0;
  RealVector coefficients;  // length dim^2

  static UnitaryParameterization zero(std::size_t dim);
};

// Basis element `index` of the Hermitian basis used by the parameterization:
// index 0 is the identity; then, for each pair j < k in lexicographic order,
// the symmetric (|j><k| + |k><j|) and antisymmetric (-i|j><k| + i|k><j|)
// elements; then the d - 1 diagonal Gell-Mann matrices. Non-identity
// elements satisfy Tr(B^2) = 2.
Matrix hermitian_basis_element(std::size_t dim, std::size_t index);
Matrix hermitian_generator(const UnitaryParameterization& p);
UnitaryOperator exp_unitary(const UnitaryParameterization& p);
// Principal logarithm: exp_unitary(log_unitary(U)) == U.
UnitaryParameterization log_unitary(const UnitaryOperator& u);

struct Evaluation {
  double score = 0.0;
  std::vector<double> residuals;
};

struct SearchProblem {
  std::size_t dim = 0;
  std::function<Evaluation(const UnitaryOperator&)> evaluate;
  std::vector<std::string> residual_names;
  // Optional: real components, smooth in U, that all vanish exactly where the
  // residuals do (e.g. the entries of rho - rho_A (x) rho_B). When set, the
  // winning point is polished toward feasibility with them.
  std::function<RealVector(const UnitaryOperator&)> components;
};

using NamedValues = std::vector<std::pair<std::string, double>>;

struct SearchResult {
  // Penalized merit of the best restart (maximum over restarts and the
  // identity coupling).
  double best_score = 0.0;
  // Raw objective at the best restart's point.
  double objective = 0.0;
  UnitaryParameterization best_params;
  // Re-evaluated from best_params after the search.
  NamedValues constraint_residuals;
  int iterations_used = 0;
  int restart_index = 0;  // -1: no restart beat the identity coupling
  int restarts_run = 0;
  int converged_restarts = 0;
  bool budget_exhausted = false;

  double max_residual() const;
  UnitaryOperator best_unitary() const { return exp_unitary(best_params); }
};

SearchResult maximize(const SearchProblem& problem, const OptimizationConfig& config);

struct Penalty {
  std::string name;
  std::function<double(const UnitaryOperator&)> residual;
};

SearchResult maximize(std::size_t dim, std::function<double(const UnitaryOperator&)> objective,
                      std::vector<Penalty> penalties, const OptimizationConfig& config);

// ---- repeatable copying search -------------------------------------------------

// Searches unitaries on S (x) A, with A starting in |0>, for the largest
// record distinguishability 1 - F(rho_A^u, rho_A^v) among couplings that
// repeatably copy: both branches end in a product of S and a pure record, and
// each S state stays inside the support of its original.
struct DistinguisherSearch {
  double distinguishability = 0.0;
  NamedValues residuals;
  SearchResult search;

  double max_residual() const;
};

DistinguisherSearch max_repeatable_distinguishability(const DensityOperator& rho_u,
                                                      const DensityOperator& rho_v,
                                                      std::size_t apparatus_dim,
                                                      const OptimizationConfig& config);

// Evaluates the repeatable-copy objective and residuals for one coupling.
Evaluation repeatable_copy_evaluation(const DensityOperator& rho_u,
                                      const DensityOperator& rho_v,
                                      std::size_t apparatus_dim, const UnitaryOperator& u);

struct FrontierPoint {
  double overlap = 0.0;  // <u|v>
  double max_distinguishability = 0.0;
  double max_residual = 0.0;
};

// Qubit originals |0> and s|0> + sqrt(1 - s^2)|1> copied into a qubit.
std::vector<FrontierPoint> sweep_overlap_frontier(std::span<const double> grid,
                                                  const OptimizationConfig& config);

}  // namespace qrepeat
