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

#include "qrepeat/copy_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qrepeat {
namespace {

Matrix identity_matrix(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return Matrix::Identity(n, n);
}

}  // namespace

// ---- RecordDecomposition -------------------------------------------------------

RecordDecomposition::RecordDecomposition(std::vector<Matrix> projectors,
                                         std::vector<double> labels,
                                         std::vector<Matrix> disturbances)
    : projectors_(std::move(projectors)), labels_(std::move(labels)) {
  if (projectors_.empty()) throw InvariantError("record decomposition has no projectors");
  dim_ = static_cast<std::size_t>(projectors_.front().rows());
  if (labels_.size() != projectors_.size()) {
    throw InvariantError("record decomposition needs one label per projector");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i] == labels_[j]) throw InvariantError("record labels must be distinct");
    }
  }
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (std::size_t k = 0; k < projectors_.size(); ++k) {
    const Matrix& p = projectors_[k];
    if (static_cast<std::size_t>(p.rows()) != dim_ || p.rows() != p.cols()) {
      throw DimensionError("record projectors must share one square shape");
    }
    if (hermiticity_residual(p) >= kTolAlg) {
      throw InvariantError("record projector " + std::to_string(k) + " is not Hermitian");
    }
    if (max_abs(p * p - p) >= kTolAlg) {
      throw InvariantError("record projector " + std::to_string(k) + " is not idempotent");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (max_abs(projectors_[j] * p) >= kTolAlg) {
        throw InvariantError("record projectors " + std::to_string(j) + " and " +
                             std::to_string(k) + " overlap");
      }
    }
    sum += p;
  }
  if (max_abs(sum - identity_matrix(dim_)) >= kTolAlg) {
    throw InvariantError("record decomposition is incomplete: projectors do not sum to identity");
  }

  if (disturbances.empty()) {
    disturbances_.assign(projectors_.size(), identity_matrix(dim_));
    return;
  }
  if (disturbances.size() != projectors_.size()) {
    throw InvariantError("record decomposition needs one disturbance per projector");
  }
  for (std::size_t k = 0; k < disturbances.size(); ++k) {
    const Matrix& d = disturbances[k];
    const Matrix& p = projectors_[k];
    if (d.rows() != p.rows() || d.cols() != p.cols()) {
      throw DimensionError("disturbance shape does not match its projector");
    }
    if (UnitaryOperator::unchecked(d, CompositeDims{dim_}).unitarity_residual() >= kTolAlg) {
      throw InvariantError("disturbance " + std::to_string(k) + " is not unitary");
    }
    if (max_abs(commutator(d, p)) >= kTolAlg) {
      throw InvariantError("disturbance " + std::to_string(k) +
                           " does not commute with its projector");
    }
    const Matrix outside = identity_matrix(dim_) - p;
    if (max_abs(d * outside - outside) >= kTolAlg) {
      throw InvariantError("disturbance " + std::to_string(k) +
                           " acts outside its record subspace");
    }
  }
  disturbances_ = std::move(disturbances);
  disturbed_ = true;
}

RecordDecomposition RecordDecomposition::from_basis(
    const Matrix& basis, const std::vector<std::vector<std::size_t>>& groups,
    std::vector<double> labels) {
  if (basis.rows() != basis.cols()) throw DimensionError("record basis must be square");
  const auto d = static_cast<std::size_t>(basis.rows());
  if (UnitaryOperator::unchecked(basis, CompositeDims{d}).unitarity_residual() >= kTolAlg) {
    throw InvariantError("record basis is not orthonormal");
  }
  std::vector<Matrix> projectors;
  for (const auto& group : groups) {
    Matrix p = Matrix::Zero(basis.rows(), basis.cols());
    for (std::size_t i : group) {
      if (i >= d) throw DimensionError("record basis column index out of range");
      p += basis.col(static_cast<Eigen::Index>(i)) *
           basis.col(static_cast<Eigen::Index>(i)).adjoint();
    }
    projectors.push_back(std::move(p));
  }
  if (labels.empty()) {
    for (std::size_t k = 0; k < groups.size(); ++k) labels.push_back(static_cast<double>(k));
  }
  return RecordDecomposition(std::move(projectors), std::move(labels));
}

RecordDecomposition RecordDecomposition::computational(
    std::size_t dim, const std::vector<std::vector<std::size_t>>& groups) {
  return from_basis(identity_matrix(dim), groups);
}

RecordDecomposition RecordDecomposition::with_disturbances(
    std::vector<Matrix> disturbances) const {
  return RecordDecomposition(projectors_, labels_, std::move(disturbances));
}

Matrix RecordDecomposition::observable() const {
  Matrix o = Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (std::size_t k = 0; k < size(); ++k) o += labels_[k] * projectors_[k];
  return o;
}

std::optional<std::size_t> RecordDecomposition::block_of(const Matrix& rho) const {
  if (static_cast<std::size_t>(rho.rows()) != dim_) {
    throw DimensionError("block_of: operator dimension mismatch");
  }
  const double total = rho.trace().real();
  for (std::size_t k = 0; k < size(); ++k) {
    if (std::abs((projectors_[k] * rho).trace().real() - total) < kTolAlg) return k;
  }
  return std::nullopt;
}

// ---- copy unitaries --------------------------------------------------------------

void TagSpec::validate() const {
  for (const StateVector& t : tags) {
    if (t.dim() != ready.dim()) {
      throw DimensionError("tag state dimension differs from the ready state");
    }
  }
}

UnitaryOperator tag_rotation(const StateVector& ready, const StateVector& tag) {
  if (ready.dim() != tag.dim()) throw DimensionError("tag_rotation: dimension mismatch");
  const Vector& a = ready.amplitudes();
  const Vector& b = tag.amplitudes();
  const Complex c = a.dot(b);
  const Vector w = b - c * a;
  const double s = w.norm();
  Matrix m = identity_matrix(ready.dim());
  if (s < 1e-14) {
    const Complex phase = c / std::abs(c);
    m += (phase - 1.0) * a * a.adjoint();
  } else {
    const Vector e = w / s;
    m -= a * a.adjoint() + e * e.adjoint();
    m += c * a * a.adjoint() + s * e * a.adjoint() + s * a * e.adjoint() -
         std::conj(c) * e * e.adjoint();
  }
  return UnitaryOperator(std::move(m), CompositeDims{ready.dim()});
}

UnitaryOperator build_controlled_copy(const RecordDecomposition& records, const TagSpec& tags) {
  tags.validate();
  if (tags.tags.size() != records.size()) {
    throw DimensionError("build_controlled_copy: need one tag per record subspace");
  }
  const std::size_t ds = records.dim();
  const std::size_t da = tags.apparatus_dim();
  const auto n = static_cast<Eigen::Index>(ds * da);
  Matrix v = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const UnitaryOperator w = tag_rotation(tags.ready, tags.tags[k]);
    v += kron(records.disturbance(k) * records.projector(k), w.matrix());
  }
  return UnitaryOperator(std::move(v), CompositeDims{ds, da});
}

// ---- chains ------------------------------------------------------------------------

CompositeDims CopyChain::layout() const {
  std::vector<std::size_t> d{system_dim()};
  for (const TagSpec& t : apparatus) d.push_back(t.apparatus_dim());
  if (environment) d.push_back(environment->dim());
  return CompositeDims(std::move(d));
}

std::size_t CopyChain::apparatus_factor(std::size_t k) const {
  if (k >= apparatus.size()) {
    throw DimensionError("apparatus index " + std::to_string(k) + " out of range");
  }
  return k + 1;
}

void CopyChain::validate() const {
  for (const TagSpec& t : apparatus) {
    t.validate();
    if (t.tags.size() != records.size()) {
      throw DimensionError("every apparatus needs one tag per record subspace");
    }
  }
}

ChainRun run_copy_chain(const DensityOperator& rho_system, const CopyChain& chain) {
  chain.validate();
  if (rho_system.dim() != chain.system_dim()) {
    throw DimensionError("run_copy_chain: system state dimension does not match the chain");
  }
  const CompositeDims layout = chain.layout();
  DensityOperator state = DensityOperator::unchecked(rho_system.matrix(),
                                                     CompositeDims{chain.system_dim()});
  for (const TagSpec& t : chain.apparatus) {
    state = tensor_product(state, DensityOperator::pure(t.ready));
  }
  if (chain.environment) state = tensor_product(state, *chain.environment);

  ChainRun run{layout, chain.apparatus_count(), state, {}};
  for (std::size_t k = 0; k < chain.apparatus_count(); ++k) {
    const UnitaryOperator v = build_controlled_copy(chain.records, chain.apparatus[k]);
    const std::size_t targets[] = {0, chain.apparatus_factor(k)};
    const Matrix full = embed(v.matrix(), layout, targets);
    state = DensityOperator::unchecked(full * state.matrix() * full.adjoint(), layout);
    run.steps.push_back(state);
  }
  return run;
}

DensityOperator extract_record(const DensityOperator& composite, const CopyChain& chain,
                               std::size_t k) {
  if (composite.dims() != chain.layout()) {
    throw DimensionError("extract_record: composite does not have the chain layout");
  }
  return partial_trace(composite, {chain.apparatus_factor(k)});
}

DensityOperator extract_system(const DensityOperator& composite) {
  return partial_trace(composite, {0});
}

double record_overlap(const DensityOperator& rec_u, const DensityOperator& rec_v) {
  if (rec_u.dim() != rec_v.dim()) throw DimensionError("record_overlap: dimension mismatch");
  return hs_inner(rec_u, rec_v);
}

DensityOperator run_mixed_copy(const DensityOperator& rho_system, const MixedCopy& step) {
  const std::size_t ds = rho_system.dim();
  const std::size_t da = step.ready.dim();
  if (step.coupling.dim() != ds * da) {
    throw DimensionError("run_mixed_copy: coupling must act on S (x) A");
  }
  DensityOperator state = tensor_product(
      DensityOperator::unchecked(rho_system.matrix(), CompositeDims{ds}),
      DensityOperator::unchecked(step.ready.matrix(), CompositeDims{da}));
  state = DensityOperator::unchecked(
      step.coupling.matrix() * state.matrix() * step.coupling.matrix().adjoint(),
      state.dims());
  if (step.environment) {
    const std::size_t de = step.environment->dim();
    state = tensor_product(state,
                           DensityOperator::unchecked(step.environment->matrix(),
                                                      CompositeDims{de}));
    if (step.environment_coupling) {
      if (step.environment_coupling->dim() != da * de) {
        throw DimensionError("run_mixed_copy: environment coupling must act on A (x) E");
      }
      const std::size_t targets[] = {1, 2};
      const Matrix full = embed(step.environment_coupling->matrix(), state.dims(), targets);
      state = DensityOperator::unchecked(full * state.matrix() * full.adjoint(), state.dims());
    }
  } else if (step.environment_coupling) {
    throw PreconditionError("run_mixed_copy: environment coupling given without environment");
  }
  return state;
}

}  // namespace qrepeat
