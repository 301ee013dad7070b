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

#pragma once

// Dense complex kernels used in the time-integration inner loops.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds
// with compiler support, an AVX2+FMA variant. The variant is chosen once at
// first use from the CPU feature flags; ATOMSWITCH_SIMD=scalar in the
// environment forces the reference path. Results of the two paths agree to
// round-off (summation order differs), see tests/test_kernels.cpp.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace atomswitch::kernels {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  // y = A x with A row-major, rows x cols.
  void (*matvec)(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y);
  // sum_i x_i y_i (no conjugation).
  cplx (*dotu)(const cplx* x, const cplx* y, std::size_t n);
  // y += alpha x
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  // max_i |e_i| / (atol + rtol max(|y0_i|, |y1_i|))
  double (*scaled_error)(const cplx* e, const cplx* y0, const cplx* y1, std::size_t n, double atol,
                         double rtol);
};

const KernelTable& table(Backend backend);
bool available(Backend backend);

// Backend in use by the free functions below.
Backend active();
// Overrides the runtime choice (tests). Throws std::invalid_argument if the
// backend is not compiled in or not supported by this CPU.
void set_active(Backend backend);
std::string_view name(Backend backend);

void matvec(std::span<const cplx> a, std::size_t rows, std::size_t cols, std::span<const cplx> x,
            std::span<cplx> y);
cplx dotu(std::span<const cplx> x, std::span<const cplx> y);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
double scaled_error(std::span<const cplx> e, std::span<const cplx> y0, std::span<const cplx> y1,
                    double atol, double rtol);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(ATOMSWITCH_WITH_AVX2)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace atomswitch::kernels
