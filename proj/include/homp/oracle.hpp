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

// Brute-force references for tests and acceptance runs. Nothing here is on
// the solver path, and the tensor loops are written out directly instead of
// going through the SIMD kernels.

#include <cstdint>
#include <functional>
#include <vector>

#include "homp/objective.hpp"

namespace homp::oracle {

struct OracleConfig {
  int starts = 50;
  double tol = 1e-12;
  int max_iters = 2000;
  std::uint64_t seed = 0;
};

struct SpectralOracleResult {
  double value = 0.0;
  RankOneAtom atom;
};

inline constexpr std::size_t kMaxBruteForceSize = 10000;

// Multi-start alternating maximization of <a, x_1 o ... o x_N> over unit
// vectors. Start 0 uses leading left singular vectors of the mode
// unfoldings; the rest are seeded Gaussian. Throws std::invalid_argument
// above kMaxBruteForceSize entries.
SpectralOracleResult spectral_norm_bruteforce(const DenseTensor& a, const OracleConfig& cfg = {});

struct FullSvd {
  Matrix u;               // rows x k
  std::vector<double> s;  // k = min(rows, cols), descending
  Matrix v;               // cols x k
};

// Dense SVD; throws when min(rows, cols) > 64.
FullSvd svd_small(const Matrix& m);

struct GridResult {
  double alpha = 0.0;
  double value = 0.0;
};

// Scans F(model + alpha * atom) at `points` equally spaced alphas in [lo, hi].
GridResult grid_line_search(const Objective& obj, const KruskalModel& model, const RankOneAtom& atom,
                            double lo, double hi, int points);

// Central difference (f(x + h d) - f(x - h d)) / 2h.
double directional_fd(const std::function<double(const DenseTensor&)>& f, const DenseTensor& x,
                      const DenseTensor& direction, double h = 1e-5);

}  // namespace homp::oracle
