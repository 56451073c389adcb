/* Copyright 2026 The HoMP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "homp/kernels.hpp"

#include <cstring>

namespace homp::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

void gemv_t_scalar(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  std::memset(y, 0, cols * sizeof(double));
  for (std::size_t r = 0; r < rows; ++r) {
    if (x[r] != 0.0) axpy_scalar(x[r], a + r * cols, y, cols);
  }
}

void gather_mul_scalar(const double* table, const std::uint32_t* idx,
                       double* out, std::size_t n) {
  for (std::size_t e = 0; e < n; ++e) out[e] *= table[idx[e]];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",        dot_scalar,   axpy_scalar,
                                 scale_scalar,    gemv_scalar,  gemv_t_scalar,
                                 gather_mul_scalar};
  return table;
}

}  // namespace homp::kernels
