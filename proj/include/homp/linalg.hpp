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

// Small dense linear algebra used on the solver path: one-sided Jacobi SVD,
// Gram matrices and a rigorous upper bound on the spectral norm.

#include <cstddef>
#include <span>
#include <vector>

#include "homp/tensor.hpp"

namespace homp::linalg {

// Thin SVD a = u * diag(s) * v^T with k = min(rows, cols) columns in u and v
// and s sorted descending. Columns of u belonging to zero singular values are
// zero vectors.
struct Svd {
  Matrix u;
  std::vector<double> s;
  Matrix v;
};

Svd svd_jacobi(const Matrix& a);

struct SingularPair {
  std::vector<double> u;
  std::vector<double> v;
  double sigma = 0.0;
};

// Flips (u, v) together so the first nonzero entry of u is positive.
void canonicalize_sign(std::vector<double>& u, std::vector<double>& v);

// Exact leading singular pair via Jacobi SVD, sign-canonicalized. sigma is 0
// and the vectors are the first unit vectors when a is zero.
SingularPair leading_pair_exact(const Matrix& a);

// Gram matrix of the smaller side: a^T a if cols <= rows, else a a^T.
Matrix small_gram(const Matrix& a);

// Largest singular value. Exact (Gram + Jacobi) when min(rows, cols) <= 64,
// otherwise a long power iteration.
double largest_singular_value(const Matrix& a);

// Upper bound on ||a||_2 from ||(a^T a)^(2^s)||_F^(1 / 2^(s+1)), which
// tightens towards sigma_1 as `squarings` grows. Falls back to ||a||_F when
// the Gram matrix would exceed `max_gram` on a side.
double spectral_norm_upper_bound(const Matrix& a, int squarings = 6, std::size_t max_gram = 64);

double norm2(std::span<const double> x);
void normalize(std::vector<double>& x);

}  // namespace homp::linalg
