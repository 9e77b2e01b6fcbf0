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

// Controlled information transfer from a system S into apparatus factors.
//
// A RecordDecomposition splits H_S into orthogonal record subspaces P_k. The
// copy unitary sum_k (D_k P_k) (x) W_k leaves each subspace invariant
// (possibly rotating states inside it by D_k) while rotating the apparatus
// ready state |A_0> onto the record's tag |A_k>.

#include <cstddef>
#include <optional>
#include <vector>

#include "qrepeat/hilbert.hpp"

namespace qrepeat {

class RecordDecomposition {
 public:
  // Projectors must be Hermitian, idempotent, mutually orthogonal and sum to
  // the identity on S. Labels must be distinct. Disturbances, when given,
  // must be unitary, commute with their projector and act as the identity
  // outside its range. Throws InvariantError otherwise.
  RecordDecomposition(std::vector<Matrix> projectors, std::vector<double> labels,
                      std::vector<Matrix> disturbances = {});

  // Record subspaces spanned by groups of columns of an orthonormal basis.
  // Labels default to 0, 1, 2, ...
  static RecordDecomposition from_basis(const Matrix& basis,
                                        const std::vector<std::vector<std::size_t>>& groups,
                                        std::vector<double> labels = {});
  static RecordDecomposition computational(
      std::size_t dim, const std::vector<std::vector<std::size_t>>& groups);

  RecordDecomposition with_disturbances(std::vector<Matrix> disturbances) const;

  std::size_t size() const { return projectors_.size(); }
  std::size_t dim() const { return dim_; }
  const Matrix& projector(std::size_t k) const { return projectors_.at(k); }
  double label(std::size_t k) const { return labels_.at(k); }
  // Identity when no disturbance was supplied.
  const Matrix& disturbance(std::size_t k) const { return disturbances_.at(k); }
  bool disturbed() const { return disturbed_; }
  // sum_k o_k P_k
  Matrix observable() const;
  // Index of the record subspace containing the support of rho, if any.
  std::optional<std::size_t> block_of(const Matrix& rho) const;

 private:
  std::vector<Matrix> projectors_;
  std::vector<double> labels_;
  std::vector<Matrix> disturbances_;
  std::size_t dim_ = 0;
  bool disturbed_ = false;
};

struct TagSpec {
  StateVector ready;
  std::vector<StateVector> tags;

  std::size_t apparatus_dim() const { return ready.dim(); }
  // Throws DimensionError when tag dimensions differ from the ready state.
  void validate() const;
};

// Unitary W with W|ready> = |tag>. It is a reflection-type map on
// span{ready, tag} (it swaps the two rays when they are orthogonal) and the
// identity on the orthogonal complement; a pure phase on |ready> when the
// rays coincide.
UnitaryOperator tag_rotation(const StateVector& ready, const StateVector& tag);

// V = sum_k (D_k P_k) (x) W_k on S (x) A.
UnitaryOperator build_controlled_copy(const RecordDecomposition& records,
                                      const TagSpec& tags);

struct CopyChain {
  RecordDecomposition records;
  std::vector<TagSpec> apparatus;              // A, A', A'', ...
  std::optional<DensityOperator> environment;  // E, untouched by copy steps

  std::size_t system_dim() const { return records.dim(); }
  std::size_t apparatus_count() const { return apparatus.size(); }
  // Factor layout [S, A, A', ..., E].
  CompositeDims layout() const;
  std::size_t apparatus_factor(std::size_t k) const;
  void validate() const;
};

struct ChainRun {
  CompositeDims layout;
  std::size_t apparatus_count = 0;
  DensityOperator initial;
  std::vector<DensityOperator> steps;  // state after step a, b, c, ...

  const DensityOperator& final_state() const { return steps.empty() ? initial : steps.back(); }
};

ChainRun run_copy_chain(const DensityOperator& rho_system, const CopyChain& chain);

// Reduced state of apparatus k (0 = A) of a composite with the chain layout.
DensityOperator extract_record(const DensityOperator& composite, const CopyChain& chain,
                               std::size_t k);
DensityOperator extract_system(const DensityOperator& composite);

// Tr(rec_u rec_v); equals |<A_u|A_v>|^2 for pure records.
double record_overlap(const DensityOperator& rec_u, const DensityOperator& rec_v);

// Coupling of S to an apparatus whose ready state is mixed. There is no
// canonical controlled form here, so the caller supplies the S (x) A unitary
// and, optionally, an environment with an A (x) E unitary applied afterwards.
struct MixedCopy {
  DensityOperator ready;
  UnitaryOperator coupling;
  std::optional<DensityOperator> environment;
  std::optional<UnitaryOperator> environment_coupling;
};

// Returns the composite on [S, A] or [S, A, E].
DensityOperator run_mixed_copy(const DensityOperator& rho_system, const MixedCopy& step);

}  // namespace qrepeat
