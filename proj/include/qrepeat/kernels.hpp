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

// Flat reductions over interleaved complex<double> storage. Every operator
// reduction used by the Hilbert-Schmidt geometry (Tr(AB) for Hermitian B,
// Frobenius distances, block accumulation in partial traces) bottoms out
// here. A scalar reference table is always present; vector tables are picked
// once at startup from what the CPU reports.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace qrepeat::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  // dst[i] += src[i]
  void (*accumulate)(double* dst, const double* src, std::size_t n);
};

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

// Table for a specific instruction set. Throws std::invalid_argument when the
// running CPU (or this build) lacks it.
const KernelTable& table(Isa isa);

// Table currently used by the library. Chosen on first use: the widest
// supported ISA, unless QREPEAT_KERNELS=scalar|avx2|neon is set.
const KernelTable& active();
Isa active_isa();

// Overrides the active table for the whole process. Intended for tests and
// benchmarking; not thread-safe with respect to concurrent kernel calls.
void force_isa(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void accumulate(double* dst, const double* src, std::size_t n);
}  // namespace scalar

#if defined(QREPEAT_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void accumulate(double* dst, const double* src, std::size_t n);
}  // namespace avx2
#endif

#if defined(QREPEAT_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
void accumulate(double* dst, const double* src, std::size_t n);
}  // namespace neon
#endif

// Re sum_i a[i] * conj(b[i]). For Hermitian B this equals Tr(A B).
inline double real_inner(std::span<const std::complex<double>> a,
                         std::span<const std::complex<double>> b) {
  return active().dot(reinterpret_cast<const double*>(a.data()),
                      reinterpret_cast<const double*>(b.data()), 2 * a.size());
}

// sum_i |a[i] - b[i]|^2
inline double distance_sq(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b) {
  return active().sum_sq_diff(reinterpret_cast<const double*>(a.data()),
                              reinterpret_cast<const double*>(b.data()),
                              2 * a.size());
}

inline void accumulate(std::span<std::complex<double>> dst,
                       std::span<const std::complex<double>> src) {
  active().accumulate(reinterpret_cast<double*>(dst.data()),
                      reinterpret_cast<const double*>(src.data()),
                      2 * dst.size());
}

}  // namespace qrepeat::kernels
