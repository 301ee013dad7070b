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

#include <cmath>

#include "atomswitch/kernels.hpp"

namespace atomswitch::kernels::detail {
namespace {

void matvec_scalar(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const cplx* row = a + r * cols;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      re += row[c].real() * x[c].real() - row[c].imag() * x[c].imag();
      im += row[c].real() * x[c].imag() + row[c].imag() * x[c].real();
    }
    y[r] = {re, im};
  }
}

cplx dotu_scalar(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
  }
  return {re, im};
}

void axpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += alpha * x[i];
  }
}

double scaled_error_scalar(const cplx* e, const cplx* y0, const cplx* y1, std::size_t n,
                           double atol, double rtol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(e[i]) / scale);
  }
  return worst;
}

}  // namespace

const KernelTable kScalarTable{matvec_scalar, dotu_scalar, axpy_scalar, scaled_error_scalar};

}  // namespace atomswitch::kernels::detail
