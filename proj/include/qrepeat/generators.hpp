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

// Seeded random instances for batch checks: repeatable couplings built from
// random record decompositions, copy chains, purification pairs and
// overlapping / orthogonal pairs of mixed states.

#include <cstddef>
#include <utility>
#include <vector>

#include "qrepeat/copy_dynamics.hpp"
#include "qrepeat/hilbert.hpp"

namespace qrepeat {

struct RecordSetup {
  Matrix basis;  // Haar-random orthonormal basis of S
  std::vector<std::vector<std::size_t>> groups;  // basis columns per record
  RecordDecomposition records;

  // Orthonormal columns spanning record k.
  Matrix block(std::size_t k) const;
};

// At least two records; each record gets a Haar-random disturbance inside its
// subspace when `disturbed`.
RecordSetup random_record_setup(std::size_t dim, Seed seed, bool disturbed);

StateVector random_state_in(const RecordSetup& setup, std::size_t k, Seed seed);
DensityOperator random_density_in(const RecordSetup& setup, std::size_t k, Seed seed);

struct RepeatableCase {
  RecordSetup setup;
  TagSpec tags;
  UnitaryOperator copy = UnitaryOperator::identity(1);
  StateVector u;
  StateVector v;
  std::size_t record_u = 0;
  std::size_t record_v = 0;
};

// S and A dims in [2, max_dim], random tags, originals inside random records
// (the same record half of the time).
RepeatableCase random_repeatable_case(Seed seed, std::size_t max_dim = 4);

struct ChainCase {
  RecordSetup setup;
  CopyChain chain;
  DensityOperator rho_u;
  DensityOperator rho_v;
};

// S dim in [2, max_system], `apparatus_count` pure-tag apparatus with dims in
// [2, max_apparatus].
ChainCase random_chain_case(Seed seed, std::size_t apparatus_count = 2,
                            std::size_t max_system = 4, std::size_t max_apparatus = 3);

// Purifications on S (x) S' of two random full-rank states sharing one random
// purifier basis; dim in [2, max_dim].
std::pair<StateVector, StateVector> random_purification_pair(Seed seed, std::size_t max_dim = 4);

// Random states whose Tr(rho_u rho_v) lies in [lo, hi] (rejection sampling
// over ranks and draws; throws PreconditionError if the window is not hit).
std::pair<DensityOperator, DensityOperator> random_overlapping_pair(Seed seed, std::size_t dim,
                                                                    double lo, double hi);

// Random states supported on complementary random subspaces.
std::pair<DensityOperator, DensityOperator> random_orthogonal_pair(Seed seed, std::size_t dim);

}  // namespace qrepeat
