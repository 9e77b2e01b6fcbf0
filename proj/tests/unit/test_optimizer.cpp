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


#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qrepeat/optimizer.hpp"

using namespace qrepeat;
using qt::max_diff;

namespace {

OptimizationConfig quick(Seed seed, int restarts = 4) {
  OptimizationConfig c;
  c.seed = seed;
  c.restarts = restarts;
  c.max_iterations = 500;
  return c;
}

}  // namespace

TEST_CASE("hermitian basis is orthogonal and complete") {
  for (std::size_t d : {1u, 2u, 3u, 4u}) {
    const std::size_t n = d * d;
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix bi = hermitian_basis_element(d, i);
      CHECK(hermiticity_residual(bi) == 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double ip = hs_inner(bi, hermitian_basis_element(d, j));
        const double expected = i != j ? 0.0 : (i == 0 ? static_cast<double>(d) : 2.0);
        CHECK(std::abs(ip - expected) < 1e-14);
      }
    }
    CHECK_THROWS_AS(hermitian_basis_element(d, n), DimensionError);
  }
}

TEST_CASE("generator matches the basis expansion") {
  Rng rng(3);
  UnitaryParameterization p = UnitaryParameterization::zero(3);
  for (Eigen::Index i = 0; i < 9; ++i) p.coefficients(i) = rng.normal();
  Matrix expected = Matrix::Zero(3, 3);
  for (std::size_t i = 0; i < 9; ++i) {
    expected += p.coefficients(static_cast<Eigen::Index>(i)) * hermitian_basis_element(3, i);
  }
  CHECK(max_diff(hermitian_generator(p), expected) < 1e-14);
  CHECK_THROWS_AS(hermitian_generator({3, RealVector::Zero(8)}), DimensionError);
}

TEST_CASE("exp and log of unitaries") {
  CHECK(max_diff(exp_unitary(UnitaryParameterization::zero(4)).matrix(), Matrix::Identity(4, 4)) < 1e-15);
  // exp(i * (pi/2) * X) = i X
  UnitaryParameterization x = UnitaryParameterization::zero(2);
  x.coefficients(1) = std::acos(-1.0) / 2.0;
  CHECK(max_diff(exp_unitary(x).matrix(), Complex(0, 1) * qt::pauli_x()) < 1e-15);
  for (Seed s = 0; s < 20; ++s) {
    const std::size_t d = 2 + s % 4;
    const UnitaryOperator u = random_unitary(d, s);
    const UnitaryParameterization p = log_unitary(u);
    CHECK(p.dim == d);
    const UnitaryOperator back = exp_unitary(p);
    CHECK(back.unitarity_residual() < kTolAlg);
    CHECK(max_diff(back.matrix(), u.matrix()) < 1e-10);
  }
}

TEST_CASE("config validation") {
  OptimizationConfig c;
  CHECK_NOTHROW(c.validate());
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.max_iterations = -1;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.penalty_weight = 0.0;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.convergence_tol = std::nan("");
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.step_init = -0.5;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.refinements = -1;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.continuation_stages = 0;
  c.refinements = 0;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("maximize finds a population transfer") {
  // maximize |<1|U|0>|^2 on a qubit
  const SearchResult r = maximize(
      2, [](const UnitaryOperator& u) { return std::norm(u.matrix()(1, 0)); }, {}, quick(1));
  CHECK(r.objective > 1.0 - 1e-8);
  CHECK(r.best_score == doctest::Approx(r.objective));
  CHECK(r.restarts_run == 4);
  CHECK(r.constraint_residuals.empty());
  CHECK(std::norm(r.best_unitary().matrix()(1, 0)) == doctest::Approx(r.objective));
}

TEST_CASE("penalties pin the search to the constraint set") {
  // transfer |0> -> |1> as much as possible while keeping |U_00 - 1/sqrt2| = 0
  const double h = qt::kInvSqrt2;
  const SearchResult r = maximize(
      2, [](const UnitaryOperator& u) { return std::norm(u.matrix()(1, 0)); },
      {{"amplitude", [h](const UnitaryOperator& u) { return std::abs(std::abs(u.matrix()(0, 0)) - h); }}},
      quick(2, 8));
  REQUIRE(r.constraint_residuals.size() == 1);
  CHECK(r.constraint_residuals[0].first == "amplitude");
  CHECK(r.constraint_residuals[0].second < 1e-6);
  CHECK(std::abs(r.objective - 0.5) < 1e-6);
}

TEST_CASE("fixed seeds reproduce; more restarts never do worse") {
  auto objective = [](const UnitaryOperator& u) {
    return std::norm(u.matrix()(2, 0)) - 0.3 * std::norm(u.matrix()(1, 1));
  };
  const SearchResult a = maximize(3, objective, {}, quick(9, 3));
  const SearchResult b = maximize(3, objective, {}, quick(9, 3));
  CHECK(a.best_score == b.best_score);
  CHECK(a.best_params.coefficients == b.best_params.coefficients);
  CHECK(a.iterations_used == b.iterations_used);
  const SearchResult one = maximize(3, objective, {}, quick(9, 1));
  CHECK(a.best_score >= one.best_score);
}

TEST_CASE("identity coupling is the fallback candidate") {
  // only the identity is feasible; the objective rewards leaving it
  const SearchResult r = maximize(
      2, [](const UnitaryOperator& u) { return 1.0 - std::norm(u.matrix()(0, 0)); },
      {{"off_identity", [](const UnitaryOperator& u) {
          return std::max(0.01, (u.matrix() - Matrix::Identity(2, 2)).norm()) - 0.01;
        }}},
      quick(4, 2));
  CHECK(r.best_score >= -1e-12);
  CHECK(r.max_residual() < 1e-6);
}

TEST_CASE("polish restores feasibility from a short search") {
  const double h = qt::kInvSqrt2;
  SearchProblem p;
  p.dim = 2;
  p.evaluate = [h](const UnitaryOperator& u) {
    const Complex a = u.matrix()(0, 0);
    return Evaluation{std::norm(u.matrix()(1, 0)), {std::hypot(a.real() - h, a.imag())}};
  };
  p.residual_names = {"amplitude"};
  p.components = [h](const UnitaryOperator& u) {
    RealVector c(2);
    c << u.matrix()(0, 0).real() - h, u.matrix()(0, 0).imag();
    return c;
  };
  OptimizationConfig c = quick(5, 1);
  c.max_iterations = 40;
  c.refinements = 0;
  c.continuation_stages = 0;
  c.polish = false;
  const SearchResult plain = maximize(p, c);
  c.polish = true;
  const SearchResult polished = maximize(p, c);
  REQUIRE(plain.max_residual() > 1e-9);  // the short search alone stops short
  CHECK(polished.max_residual() < 1e-12);
  CHECK(polished.best_score >= plain.best_score);
  CHECK(std::abs(polished.objective - 0.5) < 1e-9);
}

TEST_CASE("maximize rejects bad problems") {
  SearchProblem p;
  p.dim = 0;
  p.evaluate = [](const UnitaryOperator&) { return Evaluation{}; };
  CHECK_THROWS_AS(maximize(p, quick(1)), PreconditionError);
  p.dim = 2;
  OptimizationConfig bad = quick(1);
  bad.restarts = -3;
  CHECK_THROWS_AS(maximize(p, bad), PreconditionError);
  // worker exceptions propagate
  p.evaluate = [](const UnitaryOperator&) -> Evaluation { throw InvariantError("boom"); };
  CHECK_THROWS_AS(maximize(p, quick(1)), InvariantError);
}

TEST_CASE("repeatable copy evaluation on known couplings") {
  const DensityOperator r0 = DensityOperator::pure(StateVector::basis(2, 0));
  const DensityOperator r1 = DensityOperator::pure(StateVector::basis(2, 1));
  const Evaluation cnot = repeatable_copy_evaluation(r0, r1, 2, UnitaryOperator(qt::cnot_matrix()));
  CHECK(std::abs(cnot.score - 1.0) < 1e-14);
  REQUIRE(cnot.residuals.size() == 6);
  for (double r : cnot.residuals) CHECK(r < 1e-7);
  const Evaluation idle = repeatable_copy_evaluation(r0, r1, 2, UnitaryOperator::identity(4));
  CHECK(std::abs(idle.score) < 1e-14);
  for (double r : idle.residuals) CHECK(r < 1e-7);
  // the cnot on |+> entangles: product residual and support leak both light up
  const DensityOperator plus = DensityOperator::pure(StateVector(qt::ket({qt::kInvSqrt2, qt::kInvSqrt2})));
  const Evaluation bad = repeatable_copy_evaluation(r0, plus, 2, UnitaryOperator(qt::cnot_matrix()));
  CHECK(bad.residuals[1] > 0.1);
  CHECK(bad.residuals[3] > 0.1);
  CHECK(bad.residuals[5] > 0.1);
  CHECK_THROWS_AS(repeatable_copy_evaluation(r0, r1, 3, UnitaryOperator(qt::cnot_matrix())), DimensionError);
}

TEST_CASE("repeatable copy search: orthogonal vs identical originals") {
  const DensityOperator r0 = DensityOperator::pure(StateVector::basis(2, 0));
  const DensityOperator r1 = DensityOperator::pure(StateVector::basis(2, 1));
  OptimizationConfig c = quick(5, 8);
  c.max_iterations = 2000;
  const DistinguisherSearch yes = max_repeatable_distinguishability(r0, r1, 2, c);
  CHECK(yes.distinguishability > 0.99);
  CHECK(yes.max_residual() < 1e-6);
  const DistinguisherSearch no = max_repeatable_distinguishability(r0, r0, 2, c);
  CHECK(no.distinguishability < 1e-6);
  CHECK_THROWS_AS(max_repeatable_distinguishability(r0, r1, 1, c), PreconditionError);
}

TEST_CASE("frontier sweep endpoints") {
  OptimizationConfig c = quick(6, 8);
  c.max_iterations = 2000;
  const std::vector<double> grid = {0.0, 1.0};
  const std::vector<FrontierPoint> t = sweep_overlap_frontier(grid, c);
  REQUIRE(t.size() == 2);
  CHECK(t[0].overlap == 0.0);
  CHECK(t[0].max_distinguishability > 0.99);
  CHECK(t[1].max_distinguishability < 1e-6);
  const std::vector<double> bad = {1.5};
  CHECK_THROWS_AS(sweep_overlap_frontier(bad, c), PreconditionError);
}
