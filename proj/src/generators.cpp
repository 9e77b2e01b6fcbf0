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


#include "qrepeat/generators.hpp"

#include <algorithm>
#include <numeric>

namespace qrepeat {
namespace {

// Uniform integer in [lo, hi].
std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  return lo + std::min(hi - lo, static_cast<std::size_t>(rng.uniform() * span));
}

}  // namespace

Matrix RecordSetup::block(std::size_t k) const {
  const std::vector<std::size_t>& g = groups.at(k);
  Matrix b(basis.rows(), static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    b.col(static_cast<Eigen::Index>(i)) = basis.col(static_cast<Eigen::Index>(g[i]));
  }
  return b;
}

RecordSetup random_record_setup(std::size_t dim, Seed seed, bool disturbed) {
  if (dim < 2) throw DimensionError("random records need dim >= 2");
  Rng rng(derive_seed(seed, 0));
  const Matrix basis = random_unitary(dim, derive_seed(seed, 1)).matrix();

  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = dim - 1; i > 0; --i) std::swap(order[i], order[pick(rng, 0, i)]);
  const std::size_t count = pick(rng, 2, dim);
  std::vector<std::vector<std::size_t>> groups(count);
  for (std::size_t i = 0; i < dim; ++i) {
    groups[i < count ? i : pick(rng, 0, count - 1)].push_back(order[i]);
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());

  RecordSetup setup{basis, groups, RecordDecomposition::from_basis(basis, groups)};
  if (disturbed) {
    std::vector<Matrix> ds;
    for (std::size_t k = 0; k < count; ++k) {
      const Matrix b = setup.block(k);
      const Matrix v = random_unitary(groups[k].size(), derive_seed(seed, 10 + k)).matrix();
      const auto n = static_cast<Eigen::Index>(dim);
      ds.push_back(Matrix::Identity(n, n) - b * b.adjoint() + b * v * b.adjoint());
    }
    setup.records = setup.records.with_disturbances(std::move(ds));
  }
  return setup;
}

StateVector random_state_in(const RecordSetup& setup, std::size_t k, Seed seed) {
  const Matrix b = setup.block(k);
  const StateVector inner = random_state(static_cast<std::size_t>(b.cols()), seed);
  return StateVector::normalized(b * inner.amplitudes());
}

DensityOperator random_density_in(const RecordSetup& setup, std::size_t k, Seed seed) {
  const Matrix b = setup.block(k);
  const auto m = static_cast<std::size_t>(b.cols());
  Rng rng(derive_seed(seed, 0));
  const DensityOperator inner = random_density(m, pick(rng, 1, m), derive_seed(seed, 1));
  const Matrix rho = b * inner.matrix() * b.adjoint();
  return DensityOperator(0.5 * (rho + rho.adjoint()), CompositeDims{static_cast<std::size_t>(b.rows())});
}

RepeatableCase random_repeatable_case(Seed seed, std::size_t max_dim) {
  if (max_dim < 2) throw DimensionError("random repeatable case needs max_dim >= 2");
  Rng rng(derive_seed(seed, 0));
  const std::size_t ds = pick(rng, 2, max_dim);
  const std::size_t da = pick(rng, 2, max_dim);
  RecordSetup setup = random_record_setup(ds, derive_seed(seed, 1), true);

  TagSpec tags{StateVector::basis(da, 0), {}};
  for (std::size_t k = 0; k < setup.records.size(); ++k) {
    tags.tags.push_back(random_state(da, derive_seed(seed, 100 + k)));
  }
  const std::size_t ru = pick(rng, 0, setup.records.size() - 1);
  const std::size_t rv = rng.uniform() < 0.5 ? ru : pick(rng, 0, setup.records.size() - 1);
  StateVector u = random_state_in(setup, ru, derive_seed(seed, 2));
  StateVector v = random_state_in(setup, rv, derive_seed(seed, 3));
  UnitaryOperator copy = build_controlled_copy(setup.records, tags);
  return {std::move(setup), std::move(tags), std::move(copy), std::move(u), std::move(v), ru, rv};
}

ChainCase random_chain_case(Seed seed, std::size_t apparatus_count, std::size_t max_system,
                            std::size_t max_apparatus) {
  if (max_system < 2 || max_apparatus < 2) throw DimensionError("random chain needs dims >= 2");
  Rng rng(derive_seed(seed, 0));
  const std::size_t ds = pick(rng, 2, max_system);
  RecordSetup setup = random_record_setup(ds, derive_seed(seed, 1), true);

  std::vector<TagSpec> apparatus;
  for (std::size_t a = 0; a < apparatus_count; ++a) {
    const std::size_t da = pick(rng, 2, max_apparatus);
    TagSpec t{random_state(da, derive_seed(seed, 200 + a)), {}};
    for (std::size_t k = 0; k < setup.records.size(); ++k) {
      t.tags.push_back(random_state(da, derive_seed(seed, 1000 + 16 * a + k)));
    }
    apparatus.push_back(std::move(t));
  }
  const std::size_t ru = pick(rng, 0, setup.records.size() - 1);
  const std::size_t rv = rng.uniform() < 0.5 ? ru : pick(rng, 0, setup.records.size() - 1);
  DensityOperator rho_u = random_density_in(setup, ru, derive_seed(seed, 2));
  DensityOperator rho_v = random_density_in(setup, rv, derive_seed(seed, 3));
  CopyChain chain{setup.records, std::move(apparatus), std::nullopt};
  return {std::move(setup), std::move(chain), std::move(rho_u), std::move(rho_v)};
}

std::pair<StateVector, StateVector> random_purification_pair(Seed seed, std::size_t max_dim) {
  if (max_dim < 2) throw DimensionError("random purification needs max_dim >= 2");
  Rng rng(derive_seed(seed, 0));
  const std::size_t d = pick(rng, 2, max_dim);
  const Matrix basis = random_unitary(d, derive_seed(seed, 1)).matrix();
  const DensityOperator rho_u = random_density(d, d, derive_seed(seed, 2));
  const DensityOperator rho_v = random_density(d, d, derive_seed(seed, 3));
  return {purify_in_basis(rho_u, basis), purify_in_basis(rho_v, basis)};
}

std::pair<DensityOperator, DensityOperator> random_overlapping_pair(Seed seed, std::size_t dim,
                                                                    double lo, double hi) {
  Rng rng(derive_seed(seed, 0));
  for (std::uint64_t attempt = 0; attempt < 10000; ++attempt) {
    const Seed s = derive_seed(seed, attempt + 1);
    DensityOperator a = random_density(dim, pick(rng, 1, dim), derive_seed(s, 0));
    DensityOperator b = random_density(dim, pick(rng, 1, dim), derive_seed(s, 1));
    const double ov = hs_inner(a, b);
    if (ov >= lo && ov <= hi) return {std::move(a), std::move(b)};
  }
  throw PreconditionError("random_overlapping_pair: overlap window not reached");
}

std::pair<DensityOperator, DensityOperator> random_orthogonal_pair(Seed seed, std::size_t dim) {
  if (dim < 2) throw DimensionError("random orthogonal pair needs dim >= 2");
  RecordSetup setup = random_record_setup(dim, seed, false);
  // Merge every record after the first into the second subspace.
  std::vector<std::size_t> rest;
  for (std::size_t k = 1; k < setup.groups.size(); ++k) {
    rest.insert(rest.end(), setup.groups[k].begin(), setup.groups[k].end());
  }
  std::sort(rest.begin(), rest.end());
  setup.groups = {setup.groups[0], rest};
  setup.records = RecordDecomposition::from_basis(setup.basis, setup.groups);
  return {random_density_in(setup, 0, derive_seed(seed, 50)),
          random_density_in(setup, 1, derive_seed(seed, 51))};
}

}  // namespace qrepeat
