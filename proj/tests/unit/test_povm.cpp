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
#include <numbers>

#include "helpers.hpp"
#include "qrepeat/povm.hpp"

using namespace qrepeat;
using qt::ket;
using qt::max_diff;

namespace {

std::vector<StateVector> computational(std::size_t d) {
  std::vector<StateVector> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(StateVector::basis(d, i));
  return out;
}

std::vector<StateVector> plus_minus() {
  return {StateVector(ket({qt::kInvSqrt2, qt::kInvSqrt2})), StateVector(ket({qt::kInvSqrt2, -qt::kInvSqrt2}))};
}

// Measure Y, renormalise, evolve, measure Z -- state by state.
double two_step(const DensityOperator& rho, const StateVector& y, const StateVector& z, const Matrix& u) {
  const Matrix py = y.projector();
  const Matrix after_y = py * rho.matrix() * py;
  const double p_k = after_y.trace().real();
  if (p_k < 1e-300) return 0.0;
  const Matrix evolved = u * (after_y / p_k) * u.adjoint();
  const double p_l = (z.projector() * evolved).trace().real();
  return p_k * p_l;
}

}  // namespace

TEST_CASE("qubit |+-> then |01>: four half-projectors") {
  const SequentialMeasurement m = build_sequential_povm(plus_minus(), computational(2), UnitaryOperator::identity(2));
  REQUIRE(m.elements.size() == 4);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t l = 0; l < 2; ++l) {
      CHECK(m.element(k, l).outcome == std::pair<std::size_t, std::size_t>{k, l});
      CHECK(max_diff(m.element(k, l).matrix, 0.5 * m.y_basis[k].projector()) < 1e-12);
    }
  }
  const PovmValidity v = check_povm(m);
  CHECK(v.hermitian);
  CHECK(v.positive);
  CHECK(v.resolves_identity);
  CHECK(v.identity_residual < kTolAlg);
  CHECK_FALSE(v.projective);
  for (const ElementValidity& e : v.elements) CHECK(std::abs(e.projector_residual - 0.25) < 1e-12);
  CHECK(commutator_residual(m) > 0.1);

  for (const OutcomeProbability& p : outcome_probabilities(m, DensityOperator::pure(StateVector::basis(2, 0)))) {
    CHECK(std::abs(p.p - 0.25) < 1e-12);
  }
  for (const OutcomeProbability& p : outcome_probabilities(m, DensityOperator::maximally_mixed(2))) {
    CHECK(std::abs(p.p - 0.25) < 1e-12);
  }
  for (const OutcomeProbability& p : outcome_probabilities(m, DensityOperator::pure(plus_minus()[0]))) {
    CHECK(std::abs(p.p - (p.k == 0 ? 0.5 : 0.0)) < 1e-12);
  }
}

TEST_CASE("equal bases without evolution are projective") {
  for (std::size_t d : {2u, 3u, 5u}) {
    const std::vector<StateVector> basis = basis_from_columns(random_unitary(d, d).matrix());
    const SequentialMeasurement m = build_sequential_povm(basis, basis, UnitaryOperator::identity(d));
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t l = 0; l < d; ++l) {
        const Matrix expected = k == l ? basis[k].projector() : Matrix::Zero(d, d);
        CHECK(max_diff(m.element(k, l).matrix, expected) < 1e-12);
      }
    }
    const PovmValidity v = check_povm(m);
    CHECK(v.projective);
    CHECK(commutator_residual(m) < kTolAlg);
  }
}

TEST_CASE("random qutrit: invariants and the two-step oracle") {
  for (Seed s = 0; s < 50; ++s) {
    const std::vector<StateVector> y = basis_from_columns(random_unitary(3, 1000 + s).matrix());
    const std::vector<StateVector> z = basis_from_columns(random_unitary(3, 2000 + s).matrix());
    const UnitaryOperator u = random_unitary(3, 3000 + s);
    const SequentialMeasurement m = build_sequential_povm(y, z, u);
    CHECK(m.elements.size() == 9);
    const PovmValidity v = check_povm(m);
    CHECK(v.hermitian);
    CHECK(v.positive);
    CHECK(v.identity_residual < kTolAlg);
    CHECK_FALSE(v.projective);
    // independent summation oracle
    Matrix sum = Matrix::Zero(3, 3);
    for (const PovmElement& e : m.elements) sum += e.matrix;
    CHECK(max_diff(sum, Matrix::Identity(3, 3)) < kTolAlg);

    const DensityOperator rho = random_density(3, 1 + s % 3, 4000 + s);
    double total = 0.0;
    for (const OutcomeProbability& p : outcome_probabilities(m, rho)) {
      CHECK(p.p > -kTolAlg);
      CHECK(std::abs(p.p - two_step(rho, y[p.k], z[p.l], u.matrix())) < kTolAlg);
      total += p.p;
    }
    CHECK(std::abs(total - 1.0) < kTolAlg);
  }
}

TEST_CASE("projectivity tracks the commutator in both directions") {
  // commuting: Z basis = U Y basis (up to order)
  for (Seed s = 0; s < 10; ++s) {
    const std::size_t d = 2 + s % 4;
    const UnitaryOperator u = random_unitary(d, s);
    const std::vector<StateVector> y = basis_from_columns(random_unitary(d, 50 + s).matrix());
    const std::vector<StateVector> z = basis_from_columns(u.matrix() * random_unitary(d, 50 + s).matrix());
    const SequentialMeasurement m = build_sequential_povm(y, z, u);
    CHECK(commutator_residual(m) < kTolAlg);
    CHECK(check_povm(m).projective);

    const std::vector<StateVector> w = basis_from_columns(random_unitary(d, 90 + s).matrix());
    const SequentialMeasurement n = build_sequential_povm(y, w, u);
    CHECK(commutator_residual(n) > kTolAlg);
    CHECK_FALSE(check_povm(n).projective);
  }
}

TEST_CASE("oscillator monitoring preset") {
  const SequentialMeasurement m = oscillator_monitoring_preset(6, 0.7);
  CHECK(m.dim() == 6);
  CHECK(m.elements.size() == 36);
  const PovmValidity v = check_povm(m);
  CHECK(v.hermitian);
  CHECK(v.positive);
  CHECK(v.resolves_identity);
  CHECK_FALSE(v.projective);
  // a full period of the phase rotation brings X back to itself
  const SequentialMeasurement full = oscillator_monitoring_preset(4, 2.0 * std::numbers::pi);
  CHECK(check_povm(full).projective);
  CHECK_THROWS_AS(oscillator_monitoring_preset(1, 0.1), DimensionError);
}

TEST_CASE("sequential measurement errors") {
  const UnitaryOperator id2 = UnitaryOperator::identity(2);
  CHECK_THROWS_AS(build_sequential_povm({StateVector::basis(2, 0)}, computational(2), id2), InvariantError);
  CHECK_THROWS_AS(build_sequential_povm(computational(3), computational(3), id2), DimensionError);
  const std::vector<StateVector> skew = {StateVector::basis(2, 0), StateVector(ket({qt::kInvSqrt2, qt::kInvSqrt2}))};
  CHECK_THROWS_AS(build_sequential_povm(skew, computational(2), id2), InvariantError);
  const SequentialMeasurement m = build_sequential_povm(computational(2), computational(2), id2);
  CHECK_THROWS_AS(outcome_probabilities(m, DensityOperator::maximally_mixed(3)), DimensionError);
}
