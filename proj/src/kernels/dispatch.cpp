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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "qrepeat/kernels.hpp"

namespace qrepeat::kernels {
namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::dot, &scalar::sum_sq_diff,
                              &scalar::accumulate};
#if defined(QREPEAT_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::dot, &avx2::sum_sq_diff,
                            &avx2::accumulate};
#endif
#if defined(QREPEAT_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, &neon::dot, &neon::sum_sq_diff,
                            &neon::accumulate};
#endif

const KernelTable* select_default() {
  if (const char* env = std::getenv("QREPEAT_KERNELS")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && isa_supported(isa)) return &table(isa);
    }
  }
  if (isa_supported(Isa::avx2)) return &table(Isa::avx2);
  if (isa_supported(Isa::neon)) return &table(Isa::neon);
  return &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{select_default()};
  return ptr;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(QREPEAT_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(QREPEAT_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("kernel ISA not available: " +
                                std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(QREPEAT_HAVE_AVX2)
    case Isa::avx2: return kAvx2;
#endif
#if defined(QREPEAT_HAVE_NEON)
    case Isa::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

void force_isa(Isa isa) { current().store(&table(isa)); }

}  // namespace qrepeat::kernels
