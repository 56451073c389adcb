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

#pragma once

// Dense double-precision kernels behind every inner loop of the library.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant. The active table is chosen once at first use from the CPU feature
// flags; setting HOMP_SIMD=scalar in the environment forces the reference.
// Both variants compute the same mathematical quantity but may round
// differently because the vector variant reassociates sums.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace homp::kernels {

struct KernelTable {
  std::string_view name;

  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double* x, double alpha, std::size_t n);
  // y[r] = sum_c a[r * cols + c] * x[c]   (row-major a)
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols,
               const double* x, double* y);
  // y[c] = sum_r a[r * cols + c] * x[r]   (row-major a)
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
  // out[e] *= table[idx[e]]
  void (*gather_mul)(const double* table, const std::uint32_t* idx,
                     double* out, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the binary was built without the AVX2 translation unit or the
// running CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Table used by the library. Selected once, thread-safe.
const KernelTable& active();

// Convenience wrappers over active().
inline double dot(const double* x, const double* y, std::size_t n) {
  return active().dot(x, y, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void scale(double* x, double alpha, std::size_t n) {
  active().scale(x, alpha, n);
}
inline void gemv(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  active().gemv(a, rows, cols, x, y);
}
inline void gemv_t(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  active().gemv_t(a, rows, cols, x, y);
}
inline void gather_mul(const double* table, const std::uint32_t* idx,
                       double* out, std::size_t n) {
  active().gather_mul(table, idx, out, n);
}

}  // namespace homp::kernels
