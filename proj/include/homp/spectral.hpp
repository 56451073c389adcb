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

// Approximate tensor singular value problem: given A, find unit vectors
// x_1..x_N with large <A, x_1 (x) ... (x) x_N>.
//
// approx_spectral_2d implements the recursive splitting scheme for even
// order 2d: leading singular pair of the (1,2)-unfolding, refold of the row
// vector into an n_1 x n_2 matrix and its leading pair, contraction of the
// first two modes, recursion on the order 2d-2 remainder. Every result
// carries a certified lower bound
//
//   value >= prod(alpha_k) * sigma_hat(A_(1,2)) / n^max(0, 3d/2 - 2),
//
// where alpha_k are the measured power-iteration quality ratios and n is the
// largest extent. bcu_refine then sweeps exact pairwise SVD updates, which
// never decrease the value.

#include <cstdint>
#include <optional>
#include <vector>

#include "homp/tensor.hpp"

namespace homp {

struct PowerIterConfig {
  int max_iters = 30;
  double tol = 1e-8;  // on the relative change of the Rayleigh quotient
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument for max_iters < 1 or tol <= 0.
void validate(const PowerIterConfig& cfg);

struct LeadingPair {
  std::vector<double> u;
  std::vector<double> v;
  double sigma = 0.0;  // u^T m v, with m v = sigma u
  double alpha = 0.0;  // sigma / sigma_upper, in (0, 1]
  double sigma_upper = 0.0;
  int iterations = 0;
};

// Power iteration for the leading singular pair of a rows x cols row-major
// matrix. nullopt when the matrix is zero.
std::optional<LeadingPair> leading_pair(std::span<const double> data, std::size_t rows,
                                        std::size_t cols, const PowerIterConfig& cfg);
std::optional<LeadingPair> leading_pair(const Matrix& m, const PowerIterConfig& cfg);

struct SpectralResult {
  RankOneAtom atom;
  double value = 0.0;
  std::vector<double> alphas;
  double certified_lower_bound = 0.0;
};

// Throws std::invalid_argument for odd order. nullopt for a zero tensor.
std::optional<SpectralResult> approx_spectral_2d(const DenseTensor& a, const PowerIterConfig& cfg);

// Pairwise block-coordinate refinement of an even-order atom. When
// pair_values is given, the contraction value after each pair update is
// appended to it.
RankOneAtom bcu_refine(const DenseTensor& a, const RankOneAtom& atom, int sweeps,
                       std::vector<double>* pair_values = nullptr);

// Prepends a singleton mode to odd-order tensors.
DenseTensor pad_to_even(const DenseTensor& a);

// pad_to_even -> approx_spectral_2d -> bcu_refine, mapped back to the
// original order. The atom maximizes <g, S>; nullopt when g is zero.
std::optional<SpectralResult> select_atom(const DenseTensor& g, const PowerIterConfig& cfg,
                                          int bcu_sweeps = 1);

// ||g_(1,2)||_2 for the unfolding that merges the first two modes into rows
// (the whole tensor as a column for order 1, the matrix itself for order 2).
double unfold12_spectral_norm(const DenseTensor& g);

}  // namespace homp
