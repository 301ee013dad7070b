// Copyright 2026 The atomswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

#include "atomswitch/kernels.hpp"

namespace atomswitch::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(ATOMSWITCH_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return has;
#else
  return false;
#endif
}

Backend detect() {
  if (const char* forced = std::getenv("ATOMSWITCH_SIMD")) {
    if (std::string(forced) == "scalar") {
      return Backend::Scalar;
    }
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& active_slot() {
  static std::atomic<Backend> slot{detect()};
  return slot;
}

}  // namespace

bool available(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Backend backend) {
  if (!available(backend)) {
    throw std::invalid_argument("kernel backend not available: " + std::string(name(backend)));
  }
#if defined(ATOMSWITCH_WITH_AVX2)
  if (backend == Backend::Avx2) {
    return detail::kAvx2Table;
  }
#endif
  return detail::kScalarTable;
}

Backend active() { return active_slot().load(std::memory_order_relaxed); }

void set_active(Backend backend) {
  table(backend);
  active_slot().store(backend, std::memory_order_relaxed);
}

std::string_view name(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

void matvec(std::span<const cplx> a, std::size_t rows, std::size_t cols, std::span<const cplx> x,
            std::span<cplx> y) {
  if (a.size() != rows * cols || x.size() != cols || y.size() != rows) {
    throw std::invalid_argument("matvec: dimension mismatch");
  }
  table(active()).matvec(a.data(), rows, cols, x.data(), y.data());
}

cplx dotu(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("dotu: length mismatch");
  }
  return table(active()).dotu(x.data(), y.data(), x.size());
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("axpy: length mismatch");
  }
  table(active()).axpy(alpha, x.data(), y.data(), x.size());
}

double scaled_error(std::span<const cplx> e, std::span<const cplx> y0, std::span<const cplx> y1,
                    double atol, double rtol) {
  if (e.size() != y0.size() || e.size() != y1.size()) {
    throw std::invalid_argument("scaled_error: length mismatch");
  }
  return table(active()).scaled_error(e.data(), y0.data(), y1.data(), e.size(), atol, rtol);
}

}  // namespace atomswitch::kernels
