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

// AVX2+FMA variants. Compiled with -mavx2 -mfma; only reached after the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "atomswitch/kernels.hpp"

namespace atomswitch::kernels::detail {
namespace {

// A ymm register holds two complex doubles laid out as [re0, im0, re1, im1].
// For a*x the products are accumulated in two registers:
//   acc_rr_ii += [ar*xr, ai*xi, ...]     acc_ri_ir += [ar*xi, ai*xr, ...]
// and reduced once at the end: re = sum(rr) - sum(ii), im = sum(ri) + sum(ir).
inline cplx reduce_products(__m256d acc_rr_ii, __m256d acc_ri_ir) {
  alignas(32) double p[4];
  alignas(32) double q[4];
  _mm256_store_pd(p, acc_rr_ii);
  _mm256_store_pd(q, acc_ri_ir);
  return {(p[0] + p[2]) - (p[1] + p[3]), (q[0] + q[2]) + (q[1] + q[3])};
}

cplx dotu_avx2(const cplx* x, const cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xa = _mm256_loadu_pd(xd + 2 * i);
    const __m256d ya = _mm256_loadu_pd(yd + 2 * i);
    const __m256d xb = _mm256_loadu_pd(xd + 2 * i + 4);
    const __m256d yb = _mm256_loadu_pd(yd + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(xa, ya, acc0);
    acc1 = _mm256_fmadd_pd(xa, _mm256_permute_pd(ya, 0b0101), acc1);
    acc2 = _mm256_fmadd_pd(xb, yb, acc2);
    acc3 = _mm256_fmadd_pd(xb, _mm256_permute_pd(yb, 0b0101), acc3);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d xa = _mm256_loadu_pd(xd + 2 * i);
    const __m256d ya = _mm256_loadu_pd(yd + 2 * i);
    acc0 = _mm256_fmadd_pd(xa, ya, acc0);
    acc1 = _mm256_fmadd_pd(xa, _mm256_permute_pd(ya, 0b0101), acc1);
  }
  cplx sum = reduce_products(_mm256_add_pd(acc0, acc2), _mm256_add_pd(acc1, acc3));
  for (; i < n; ++i) {
    sum += x[i] * y[i];
  }
  return sum;
}

void matvec_avx2(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dotu_avx2(a + r * cols, x, cols);
  }
}

void axpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0b0101);  // [xi, xr, ...]
    __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    // alpha*x = [ar*xr - ai*xi, ar*xi + ai*xr]
    yv = _mm256_fmadd_pd(ar, xv, yv);
    yv = _mm256_addsub_pd(yv, _mm256_mul_pd(ai, xs));
    _mm256_storeu_pd(yd + 2 * i, yv);
  }
  for (; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

double scaled_error_avx2(const cplx* e, const cplx* y0, const cplx* y1, std::size_t n, double atol,
                         double rtol) {
  const double* ed = reinterpret_cast<const double*>(e);
  const double* ad = reinterpret_cast<const double*>(y0);
  const double* bd = reinterpret_cast<const double*>(y1);
  const __m256d vatol = _mm256_set1_pd(atol);
  const __m256d vrtol = _mm256_set1_pd(rtol);
  __m256d worst = _mm256_setzero_pd();
  std::size_t i = 0;
  // Squared magnitudes come out pairwise-summed by hadd as [|a0|^2, |b0|^2, |a1|^2, |b1|^2].
  for (; i + 2 <= n; i += 2) {
    const __m256d ev = _mm256_loadu_pd(ed + 2 * i);
    const __m256d av = _mm256_loadu_pd(ad + 2 * i);
    const __m256d bv = _mm256_loadu_pd(bd + 2 * i);
    const __m256d ab = _mm256_sqrt_pd(_mm256_hadd_pd(_mm256_mul_pd(av, av), _mm256_mul_pd(bv, bv)));
    const __m256d ee = _mm256_sqrt_pd(_mm256_hadd_pd(_mm256_mul_pd(ev, ev), _mm256_mul_pd(ev, ev)));
    const __m256d ymax = _mm256_max_pd(ab, _mm256_permute_pd(ab, 0b0101));
    const __m256d scale = _mm256_fmadd_pd(vrtol, ymax, vatol);
    worst = _mm256_max_pd(worst, _mm256_div_pd(ee, scale));
  }
  alignas(32) double w[4];
  _mm256_store_pd(w, worst);
  double result = std::max(std::max(w[0], w[1]), std::max(w[2], w[3]));
  for (; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    result = std::max(result, std::abs(e[i]) / scale);
  }
  return result;
}

}  // namespace

const KernelTable kAvx2Table{matvec_avx2, dotu_avx2, axpy_avx2, scaled_error_avx2};

}  // namespace atomswitch::kernels::detail
