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

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "homp/tensor.hpp"

namespace homp::testing {

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

inline DenseTensor random_tensor(const Shape& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return DenseTensor(dims, random_vector(volume(dims), rng));
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return Matrix(rows, cols, random_vector(rows * cols, rng));
}

inline RankOneAtom random_atom(const Shape& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> f;
  for (std::size_t n : dims) f.push_back(random_vector(n, rng));
  return RankOneAtom::from_unnormalized(std::move(f)).first;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace homp::testing
