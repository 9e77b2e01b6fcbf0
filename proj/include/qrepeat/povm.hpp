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

// Two-step sequential measurements: a projective measurement in the y basis,
// free evolution U_t, then a projective measurement in the z basis. The
// effective operators F(k,l) = |y_k><y_k| U^dag |z_l><z_l| U |y_k><y_k| form a
// POVM on the initial state that is projective only when the two observables
// commute in the Heisenberg picture.

#include <cstddef>
#include <utility>
#include <vector>

#include "qrepeat/hilbert.hpp"

namespace qrepeat {

struct PovmElement {
  Matrix matrix;
  std::pair<std::size_t, std::size_t> outcome;  // (k, l)
};

struct SequentialMeasurement {
  std::vector<StateVector> y_basis;
  std::vector<StateVector> z_basis;
  UnitaryOperator evolution = UnitaryOperator::identity(1);
  std::vector<PovmElement> elements;  // k-major: index k * d + l

  std::size_t dim() const { return y_basis.size(); }
  const PovmElement& element(std::size_t k, std::size_t l) const {
    return elements.at(k * dim() + l);
  }
};

// Columns of an orthonormal matrix as basis states.
std::vector<StateVector> basis_from_columns(const Matrix& columns);

// Throws DimensionError on mismatched dimensions and InvariantError when a
// basis is not complete and orthonormal within kTolAlg.
SequentialMeasurement build_sequential_povm(const std::vector<StateVector>& y_basis,
                                            const std::vector<StateVector>& z_basis,
                                            const UnitaryOperator& evolution);

struct ElementValidity {
  std::pair<std::size_t, std::size_t> outcome;
  double hermiticity_residual = 0.0;  // max |F - F^dag|
  double min_eigenvalue = 0.0;
  double projector_residual = 0.0;  // spectral norm of F^2 - F
};

struct PovmValidity {
  std::vector<ElementValidity> elements;
  double identity_residual = 0.0;  // max |sum F - 1|
  bool hermitian = false;
  bool positive = false;
  bool resolves_identity = false;
  bool projective = false;
};

PovmValidity check_povm(const SequentialMeasurement& m, double tol = kTolAlg);

struct OutcomeProbability {
  std::size_t k = 0;
  std::size_t l = 0;
  double p = 0.0;
};

// p(k, l) = Tr F(k, l) rho0, k-major. Throws DimensionError on mismatch.
std::vector<OutcomeProbability> outcome_probabilities(const SequentialMeasurement& m,
                                                      const DensityOperator& rho0);

// max |[Y, U^dag Z U]| with Y, Z labelled 0, 1, ..., d-1 on their bases.
double commutator_residual(const SequentialMeasurement& m);

// Monitoring the same observable twice: X = (a + a^dag)/sqrt(2) truncated to
// `dim` levels; both measurements are in X's eigenbasis and the evolution is
// the truncated oscillator rotation exp(-i t a^dag a), expressed in that basis.
// For generic t the rotated X no longer commutes with X.
SequentialMeasurement oscillator_monitoring_preset(std::size_t dim, double t);

}  // namespace qrepeat
