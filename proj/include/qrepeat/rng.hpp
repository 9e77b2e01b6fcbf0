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

#include <complex>
#include <cstdint>
#include <random>

namespace qrepeat {

using Seed = std::uint64_t;

// Mixes a master seed with an index into an independent stream seed
// (splitmix64 finalizer over both words).
Seed derive_seed(Seed master, std::uint64_t index);

// Seeded generator with a platform-independent normal transform.
// std::normal_distribution is implementation-defined, so Gaussian draws go
// through Box-Muller on the raw 64-bit engine output instead.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  // Standard complex normal: real and imaginary parts N(0, 1/2).
  std::complex<double> complex_normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qrepeat
