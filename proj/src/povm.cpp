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


#include "qrepeat/povm.hpp"

#include <algorithm>
#include <cmath>

namespace qrepeat {
namespace {

void check_basis(const std::vector<StateVector>& basis, std::size_t dim, const char* name) {
  for (const StateVector& b : basis) {
    if (b.dim() != dim) throw DimensionError(std::string(name) + " basis: dimension mismatch");
  }
  if (basis.size() != dim) {
    throw InvariantError(std::string(name) + " basis is incomplete");
  }
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix cols(d, d);
  for (Eigen::Index i = 0; i < d; ++i) cols.col(i) = basis[static_cast<std::size_t>(i)].amplitudes();
  if (max_abs(cols.adjoint() * cols - Matrix::Identity(d, d)) >= kTolAlg) {
    throw InvariantError(std::string(name) + " basis is not orthonormal");
  }
}

Matrix labelled_observable(const std::vector<StateVector>& basis) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  Matrix o = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < basis.size(); ++k) o += static_cast<double>(k) * basis[k].projector();
  return o;
}

}  // namespace

std::vector<StateVector> basis_from_columns(const Matrix& columns) {
  std::vector<StateVector> out;
  for (Eigen::Index i = 0; i < columns.cols(); ++i) out.emplace_back(Vector(columns.col(i)));
  return out;
}

SequentialMeasurement build_sequential_povm(const std::vector<StateVector>& y_basis,
                                            const std::vector<StateVector>& z_basis,
                                            const UnitaryOperator& evolution) {
  const std::size_t d = evolution.dim();
  check_basis(y_basis, d, "y");
  check_basis(z_basis, d, "z");

  SequentialMeasurement m{y_basis, z_basis, evolution, {}};
  const Matrix& u = evolution.matrix();
  for (std::size_t k = 0; k < d; ++k) {
    const Matrix py = y_basis[k].projector();
    for (std::size_t l = 0; l < d; ++l) {
      const Matrix f = py * u.adjoint() * z_basis[l].projector() * u * py;
      m.elements.push_back({f, {k, l}});
    }
  }
  return m;
}

PovmValidity check_povm(const SequentialMeasurement& m, double tol) {
  PovmValidity v;
  const auto d = static_cast<Eigen::Index>(m.dim());
  Matrix total = Matrix::Zero(d, d);
  double worst_herm = 0.0;
  double lowest = 0.0;
  double worst_proj = 0.0;
  for (const PovmElement& e : m.elements) {
    ElementValidity ev;
    ev.outcome = e.outcome;
    ev.hermiticity_residual = hermiticity_residual(e.matrix);
    ev.min_eigenvalue = hermitian_eigen(e.matrix).values.minCoeff();
    // F^2 - F is Hermitian, so its spectral norm is its largest |eigenvalue|.
    ev.projector_residual =
        hermitian_eigen(e.matrix * e.matrix - e.matrix).values.cwiseAbs().maxCoeff();
    worst_herm = std::max(worst_herm, ev.hermiticity_residual);
    lowest = std::min(lowest, ev.min_eigenvalue);
    worst_proj = std::max(worst_proj, ev.projector_residual);
    total += e.matrix;
    v.elements.push_back(ev);
  }
  v.identity_residual = max_abs(total - Matrix::Identity(d, d));
  v.hermitian = worst_herm < tol;
  v.positive = lowest > -tol;
  v.resolves_identity = v.identity_residual < tol;
  v.projective = worst_proj < tol;
  return v;
}

std::vector<OutcomeProbability> outcome_probabilities(const SequentialMeasurement& m,
                                                      const DensityOperator& rho0) {
  if (rho0.dim() != m.dim()) throw DimensionError("outcome_probabilities: dimension mismatch");
  std::vector<OutcomeProbability> table;
  for (const PovmElement& e : m.elements) {
    table.push_back({e.outcome.first, e.outcome.second, hs_inner(e.matrix, rho0.matrix())});
  }
  return table;
}

double commutator_residual(const SequentialMeasurement& m) {
  const Matrix& u = m.evolution.matrix();
  const Matrix y = labelled_observable(m.y_basis);
  const Matrix z = u.adjoint() * labelled_observable(m.z_basis) * u;
  return max_abs(commutator(y, z));
}

SequentialMeasurement oscillator_monitoring_preset(std::size_t dim, double t) {
  if (dim < 2) throw DimensionError("oscillator preset needs at least two levels");
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix x = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n + 1 < d; ++n) {
    const double a = std::sqrt(static_cast<double>(n + 1) / 2.0);
    x(n, n + 1) = a;
    x(n + 1, n) = a;
  }
  const Matrix b = hermitian_eigen(x).vectors;  // columns: eigenbasis of X
  Vector phases(d);
  for (Eigen::Index n = 0; n < d; ++n) phases(n) = std::polar(1.0, -t * static_cast<double>(n));
  const Matrix rotation = phases.asDiagonal();
  // Evolution in X's eigenbasis, so the computational basis measures X.
  const UnitaryOperator evolution(b.adjoint() * rotation * b);
  std::vector<StateVector> basis;
  for (std::size_t k = 0; k < dim; ++k) basis.push_back(StateVector::basis(dim, k));
  return build_sequential_povm(basis, basis, evolution);
}

}  // namespace qrepeat
