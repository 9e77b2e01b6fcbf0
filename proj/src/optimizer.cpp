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

#include "qrepeat/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace qrepeat {
namespace {
// Warm-up stages only need to move the simplex into the right basin.
constexpr int kWarmupIterationDivisor = 2;
constexpr double kWarmupTol = 1e-6;
constexpr int kPolishIterations = 50;
constexpr double kPolishFloor = 1e-14;
constexpr double kPolishProbe = 1e-6;

struct SimplexResult {
  RealVector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead minimization with dimension-adaptive coefficients
// (reflection 1, expansion 1 + 2/n, contraction 3/4 - 1/(2n),
// shrink 1 - 1/n). Converged when every vertex lies within `tol` of the best
// vertex in the max norm, or when the vertex values agree to `tol` (relative)
// -- the latter covers directions the objective does not depend on, such as
// the global phase, along which the simplex never collapses.
SimplexResult nelder_mead(const std::function<double(const RealVector&)>& f, RealVector x0,
                          double step, int max_iterations, double tol) {
  const Eigen::Index n = x0.size();
  const double dn = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = n > 1 ? 1.0 + 2.0 / dn : 2.0;
  const double contract = n > 1 ? 0.75 - 0.5 / dn : 0.5;
  const double shrink = n > 1 ? 1.0 - 1.0 / dn : 0.5;

  auto safe = [&](const RealVector& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };

  std::vector<RealVector> pts(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> vals(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)](i) += step;
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = safe(pts[i]);

  std::vector<std::size_t> order(pts.size());
  SimplexResult out;
  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double diameter = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i != best) diameter = std::max(diameter, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    }
    const double spread = vals[worst] - vals[best];
    if (diameter < tol || spread < tol * (1.0 + std::abs(vals[best]))) {
      out.converged = true;
      break;
    }
    if (out.iterations >= max_iterations) break;
    ++out.iterations;

    RealVector centroid = RealVector::Zero(n);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= dn;

    const RealVector xr = centroid + reflect * (centroid - pts[worst]);
    const double fr = safe(xr);
    if (fr < vals[best]) {
      const RealVector xe = centroid + expand * (xr - centroid);
      const double fe = safe(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    bool accepted = false;
    if (fr < vals[worst]) {
      const RealVector xc = centroid + contract * (xr - centroid);
      const double fc = safe(xc);
      if (fc <= fr) {
        pts[worst] = xc;
        vals[worst] = fc;
        accepted = true;
      }
    } else {
      const RealVector xc = centroid + contract * (pts[worst] - centroid);
      const double fc = safe(xc);
      if (fc < vals[worst]) {
        pts[worst] = xc;
        vals[worst] = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == best) continue;
        pts[i] = pts[best] + shrink * (pts[i] - pts[best]);
        vals[i] = safe(pts[i]);
      }
    }
  }
  const std::size_t best = order.front();
  out.x = pts[best];
  out.value = vals[best];
  return out;
}

double merit_of(const Evaluation& e, double weight) {
  double pen = 0.0;
  for (double r : e.residuals) pen += r;
  return e.score - weight * pen;
}

template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min<int>(static_cast<int>(hw), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = next++; i < count; i = next++) fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Drives the constraint components to zero from x by Levenberg-Marquardt
// (central-difference Jacobian). Unlike the norm-like residuals the components
// are smooth, so this converges where the simplex crawls. The damping matters:
// defects often vanish quadratically, leaving J nearly singular.
RealVector restore_feasibility(const SearchProblem& problem, RealVector x) {
  const std::size_t dim = problem.dim;
  auto components = [&](const RealVector& p) { return problem.components(exp_unitary({dim, p})); };
  RealVector c = components(x);
  double mu = -1.0;
  for (int it = 0; it < kPolishIterations && c.norm() > kPolishFloor; ++it) {
    Eigen::MatrixXd jac(c.size(), x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      RealVector plus = x;
      RealVector minus = x;
      plus(j) += kPolishProbe;
      minus(j) -= kPolishProbe;
      jac.col(j) = (components(plus) - components(minus)) / (2.0 * kPolishProbe);
    }
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const RealVector gradient = jac.transpose() * c;
    if (mu < 0.0) mu = 1e-3 * normal.diagonal().maxCoeff();
    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal().array() += mu;
      const RealVector trial = x - damped.ldlt().solve(gradient);
      RealVector ct = components(trial);
      if (ct.norm() < c.norm()) {
        x = trial;
        c = std::move(ct);
        mu /= 3.0;
        improved = true;
      } else {
        mu *= 4.0;
      }
    }
    if (!improved) break;
  }
  return x;
}

Matrix support_projector(const Matrix& rho) {
  const HermitianEigen e = hermitian_eigen(rho);
  Matrix p = Matrix::Zero(rho.rows(), rho.cols());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values(k) > 1e-10) p += e.vectors.col(k) * e.vectors.col(k).adjoint();
  }
  return p;
}

}  // namespace

void OptimizationConfig::validate() const {
  if (restarts <= 0) throw PreconditionError("optimizer: restarts must be positive");
  if (max_iterations <= 0) throw PreconditionError("optimizer: max_iterations must be positive");
  if (!(penalty_weight > 0.0)) throw PreconditionError("optimizer: penalty_weight must be positive");
  if (!(convergence_tol > 0.0)) {
    throw PreconditionError("optimizer: convergence_tol must be positive");
  }
  if (!(step_init > 0.0)) throw PreconditionError("optimizer: step_init must be positive");
  if (refinements < 0) throw PreconditionError("optimizer: refinements must be non-negative");
  if (continuation_stages < 0) {
    throw PreconditionError("optimizer: continuation_stages must be non-negative");
  }
}

UnitaryParameterization UnitaryParameterization::zero(std::size_t dim) {
  return {dim, RealVector::Zero(static_cast<Eigen::Index>(dim * dim))};
}

Matrix hermitian_basis_element(std::size_t dim, std::size_t index) {
  if (index >= dim * dim) throw DimensionError("hermitian basis index out of range");
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix b = Matrix::Zero(d, d);
  if (index == 0) return Matrix::Identity(d, d);
  std::size_t i = 1;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      if (i == index) {
        b(j, k) = 1.0;
        b(k, j) = 1.0;
        return b;
      }
      if (i + 1 == index) {
        b(j, k) = Complex(0.0, -1.0);
        b(k, j) = Complex(0.0, 1.0);
        return b;
      }
      i += 2;
    }
  }
  const Eigen::Index l = static_cast<Eigen::Index>(index - i) + 1;
  const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
  for (Eigen::Index m = 0; m < l; ++m) b(m, m) = norm;
  b(l, l) = -static_cast<double>(l) * norm;
  return b;
}

Matrix hermitian_generator(const UnitaryParameterization& p) {
  const std::size_t dim = p.dim;
  if (static_cast<std::size_t>(p.coefficients.size()) != dim * dim) {
    throw DimensionError("unitary parameterization needs dim^2 coefficients");
  }
  const auto d = static_cast<Eigen::Index>(dim);
  const RealVector& c = p.coefficients;
  Matrix h = Matrix::Zero(d, d);
  for (Eigen::Index m = 0; m < d; ++m) h(m, m) = c(0);
  Eigen::Index i = 1;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      h(j, k) += Complex(c(i), -c(i + 1));
      h(k, j) += Complex(c(i), c(i + 1));
      i += 2;
    }
  }
  for (Eigen::Index l = 1; l < d; ++l, ++i) {
    const double w = c(i) * std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (Eigen::Index m = 0; m < l; ++m) h(m, m) += w;
    h(l, l) -= static_cast<double>(l) * w;
  }
  return h;
}

UnitaryOperator exp_unitary(const UnitaryParameterization& p) {
  const HermitianEigen e = hermitian_eigen(hermitian_generator(p));
  Vector phases(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    phases(k) = std::polar(1.0, e.values(k));
  }
  return UnitaryOperator::unchecked(e.vectors * phases.asDiagonal() * e.vectors.adjoint(),
                                    CompositeDims{p.dim});
}

UnitaryParameterization log_unitary(const UnitaryOperator& u) {
  const std::size_t dim = u.dim();
  Eigen::ComplexSchur<Matrix> schur(u.matrix());
  const Matrix& q = schur.matrixU();
  const Matrix& t = schur.matrixT();
  Vector angles(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k) angles(k) = std::arg(t(k, k));
  Matrix h = q * angles.asDiagonal() * q.adjoint();
  h = 0.5 * (h + h.adjoint()).eval();

  UnitaryParameterization p = UnitaryParameterization::zero(dim);
  p.coefficients(0) = h.trace().real() / static_cast<double>(dim);
  for (std::size_t i = 1; i < dim * dim; ++i) {
    p.coefficients(static_cast<Eigen::Index>(i)) =
        0.5 * hs_inner(h, hermitian_basis_element(dim, i));
  }
  return p;
}

double SearchResult::max_residual() const {
  double m = 0.0;
  for (const auto& [name, value] : constraint_residuals) m = std::max(m, value);
  return m;
}

SearchResult maximize(const SearchProblem& problem, const OptimizationConfig& config) {
  config.validate();
  if (problem.dim == 0) throw PreconditionError("maximize: unitary dimension must be positive");
  const std::size_t dim = problem.dim;
  const auto n = static_cast<Eigen::Index>(dim * dim);
  const double weight = config.penalty_weight;

  auto negated_merit = [&](double w) {
    return [&, w](const RealVector& x) {
      return -merit_of(problem.evaluate(exp_unitary({dim, x})), w);
    };
  };
  const auto final_merit = negated_merit(weight);

  std::vector<SimplexResult> runs(static_cast<std::size_t>(config.restarts));
  parallel_for(config.restarts, [&](int r) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    RealVector x = RealVector(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.normal();
    int iterations = 0;
    // Penalty continuation: a soft penalty lets the simplex travel toward
    // high scores before the full weight pins it to the feasible set. It can
    // also strand the simplex in an infeasible basin (no-go problems where
    // the best feasible score is 0), so odd restarts skip it.
    const int stages = r % 2 == 0 ? config.continuation_stages : 0;
    for (int stage = stages; stage > 0; --stage) {
      const auto f = negated_merit(weight * std::pow(10.0, -stage));
      SimplexResult s = nelder_mead(f, std::move(x), config.step_init,
                                    std::max(1, config.max_iterations / kWarmupIterationDivisor),
                                    std::max(config.convergence_tol, kWarmupTol));
      iterations += s.iterations;
      x = std::move(s.x);
    }
    SimplexResult run = nelder_mead(final_merit, std::move(x), config.step_init,
                                    config.max_iterations, config.convergence_tol);
    for (int k = 0; k < config.refinements; ++k) {
      SimplexResult next = nelder_mead(final_merit, run.x, config.step_init,
                                       config.max_iterations, config.convergence_tol);
      next.iterations += run.iterations;
      const bool improved = next.value < run.value - config.convergence_tol;
      if (next.value <= run.value) run = std::move(next);
      if (!improved) break;
    }
    run.iterations += iterations;
    runs[static_cast<std::size_t>(r)] = std::move(run);
  });

  std::size_t best = 0;
  int converged = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (runs[r].converged) ++converged;
    if (runs[r].value < runs[best].value) best = r;
  }

  SearchResult result;
  result.best_params = {dim, runs[best].x};
  Evaluation eval = problem.evaluate(exp_unitary(result.best_params));
  result.best_score = merit_of(eval, weight);
  // Feasibility restoration: the simplex often stalls a little off the
  // constraint set. Keep the restored point if the merit improves.
  if (config.polish && problem.components) {
    const RealVector fixed_x = restore_feasibility(problem, runs[best].x);
    const Evaluation fixed = problem.evaluate(exp_unitary({dim, fixed_x}));
    if (merit_of(fixed, weight) > result.best_score) {
      result.best_params = {dim, fixed_x};
      result.best_score = merit_of(fixed, weight);
      eval = fixed;
    }
  }
  result.iterations_used = runs[best].iterations;
  result.restart_index = static_cast<int>(best);
  const UnitaryParameterization origin = UnitaryParameterization::zero(dim);
  const Evaluation idle = problem.evaluate(exp_unitary(origin));
  if (merit_of(idle, weight) > result.best_score) {
    result.best_params = origin;
    result.best_score = merit_of(idle, weight);
    result.iterations_used = 0;
    result.restart_index = -1;
    eval = idle;
  }
  result.objective = eval.score;
  for (std::size_t i = 0; i < eval.residuals.size(); ++i) {
    const std::string name =
        i < problem.residual_names.size() ? problem.residual_names[i] : "residual_" + std::to_string(i);
    result.constraint_residuals.emplace_back(name, eval.residuals[i]);
  }
  result.restarts_run = config.restarts;
  result.converged_restarts = converged;
  result.budget_exhausted = converged == 0;
  return result;
}

SearchResult maximize(std::size_t dim, std::function<double(const UnitaryOperator&)> objective,
                      std::vector<Penalty> penalties, const OptimizationConfig& config) {
  SearchProblem problem;
  problem.dim = dim;
  for (const Penalty& p : penalties) problem.residual_names.push_back(p.name);
  problem.evaluate = [objective = std::move(objective),
                      penalties = std::move(penalties)](const UnitaryOperator& u) {
    Evaluation e;
    e.score = objective(u);
    for (const Penalty& p : penalties) e.residuals.push_back(p.residual(u));
    return e;
  };
  return maximize(problem, config);
}

// ---- repeatable copying -----------------------------------------------------------

namespace {

struct CopyBranch {
  // rho = F F^dag with F of full column rank; A starts in |0>.
  Matrix factor;
  Matrix outside;  // 1 - support projector of rho
};

CopyBranch make_branch(const DensityOperator& rho) {
  const HermitianEigen e = hermitian_eigen(rho.matrix());
  const auto n = rho.matrix().rows();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values(k) > 1e-13) kept.push_back(k);
  }
  CopyBranch b;
  b.factor.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    b.factor.col(static_cast<Eigen::Index>(j)) = std::sqrt(e.values(kept[j])) * e.vectors.col(kept[j]);
  }
  b.outside = Matrix::Identity(n, n) - support_projector(rho.matrix());
  return b;
}

struct BranchOutcome {
  Matrix record;
  double product = 0.0;
  double impurity = 0.0;
  double leakage = 0.0;
};

BranchOutcome evolve_branch(const CopyBranch& b, const Matrix& u, Eigen::Index da) {
  const Eigen::Index n = b.factor.rows();
  const Eigen::Index total = n * da;
  // Only the columns of U with A in |0> see the input: index s*da.
  const Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> cols(u.data(), total, n,
                                                               Eigen::OuterStride<>(total * da));
  const Matrix phi = cols * b.factor;
  Matrix out(total, total);
  out.noalias() = phi * phi.adjoint();

  Matrix sys = Matrix::Zero(n, n);
  BranchOutcome o;
  o.record = Matrix::Zero(da, da);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index t = 0; t < n; ++t) {
      for (Eigen::Index a = 0; a < da; ++a) sys(s, t) += out(s * da + a, t * da + a);
    }
  }
  for (Eigen::Index a = 0; a < da; ++a) {
    for (Eigen::Index c = 0; c < da; ++c) {
      for (Eigen::Index s = 0; s < n; ++s) o.record(a, c) += out(s * da + a, s * da + c);
    }
  }
  double dist2 = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index c = 0; c < da; ++c) {
      for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index a = 0; a < da; ++a) {
          dist2 += std::norm(out(s * da + a, t * da + c) - sys(s, t) * o.record(a, c));
        }
      }
    }
  }
  o.product = std::sqrt(dist2);
  o.impurity = std::sqrt(std::max(0.0, 1.0 - o.record.squaredNorm()));
  // Tr(outside * sys)
  o.leakage = std::sqrt(std::max(0.0, b.outside.cwiseProduct(sys.transpose()).sum().real()));
  return o;
}

const std::vector<std::string> kCopyResidualNames = {
    "product_u", "product_v", "tag_impurity_u", "tag_impurity_v", "support_leak_u", "support_leak_v"};

Evaluation copy_evaluation(const CopyBranch& bu, const CopyBranch& bv, std::size_t da,
                           const UnitaryOperator& u) {
  const auto a = static_cast<Eigen::Index>(da);
  const BranchOutcome ou = evolve_branch(bu, u.matrix(), a);
  const BranchOutcome ov = evolve_branch(bv, u.matrix(), a);
  Evaluation e;
  e.score = 1.0 - fidelity(ou.record, ov.record);
  e.residuals = {ou.product, ov.product, ou.impurity, ov.impurity, ou.leakage, ov.leakage};
  return e;
}

}  // namespace

double DistinguisherSearch::max_residual() const {
  double m = 0.0;
  for (const auto& [name, value] : residuals) m = std::max(m, value);
  return m;
}

Evaluation repeatable_copy_evaluation(const DensityOperator& rho_u, const DensityOperator& rho_v,
                                      std::size_t apparatus_dim, const UnitaryOperator& u) {
  if (rho_u.dim() != rho_v.dim()) throw DimensionError("repeatable copy: state dimension mismatch");
  const CompositeDims dims{rho_u.dim(), apparatus_dim};
  if (u.dim() != dims.total()) throw DimensionError("repeatable copy: coupling must act on S (x) A");
  return copy_evaluation(make_branch(rho_u), make_branch(rho_v), apparatus_dim, u);
}

DistinguisherSearch max_repeatable_distinguishability(const DensityOperator& rho_u,
                                                      const DensityOperator& rho_v,
                                                      std::size_t apparatus_dim,
                                                      const OptimizationConfig& config) {
  if (rho_u.dim() != rho_v.dim()) throw DimensionError("repeatable copy: state dimension mismatch");
  if (apparatus_dim < 2) throw PreconditionError("repeatable copy: apparatus needs dim >= 2");
  const CompositeDims dims{rho_u.dim(), apparatus_dim};
  const CopyBranch bu = make_branch(rho_u);
  const CopyBranch bv = make_branch(rho_v);

  SearchProblem problem;
  problem.dim = dims.total();
  problem.residual_names = kCopyResidualNames;
  problem.evaluate = [&](const UnitaryOperator& u) {
    return copy_evaluation(bu, bv, apparatus_dim, u);
  };

  DistinguisherSearch out;
  out.search = maximize(problem, config);
  out.distinguishability = out.search.objective;
  out.residuals = out.search.constraint_residuals;
  return out;
}

std::vector<FrontierPoint> sweep_overlap_frontier(std::span<const double> grid,
                                                  const OptimizationConfig& config) {
  for (double s : grid) {
    if (!(s >= 0.0 && s <= 1.0)) throw PreconditionError("sweep grid values must lie in [0, 1]");
  }
  std::vector<FrontierPoint> table;
  const DensityOperator rho_u = DensityOperator::pure(StateVector::basis(2, 0));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid[i];
    Vector v(2);
    v << s, std::sqrt(std::max(0.0, 1.0 - s * s));
    const DensityOperator rho_v = DensityOperator::pure(StateVector::normalized(v));
    OptimizationConfig point = config;
    point.seed = derive_seed(config.seed, i);
    const DistinguisherSearch found = max_repeatable_distinguishability(rho_u, rho_v, 2, point);
    table.push_back({s, found.distinguishability, found.max_residual()});
  }
  return table;
}

}  // namespace qrepeat
