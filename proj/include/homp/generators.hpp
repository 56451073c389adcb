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

// Synthetic instances with a planted low-rank ground truth.

#include <cstdint>
#include <utility>
#include <vector>

#include "homp/completion.hpp"
#include "homp/mlmtl.hpp"

namespace homp {

struct CompletionConfig {
  Shape dims{30, 30, 30};
  std::size_t cp_rank = 5;
  double missing_ratio = 0.5;
  double noise = 0.0;          // stddev of additive Gaussian noise on observed entries
  double outlier_frac = 0.0;   // fraction of observed entries replaced by outliers
  std::pair<double, double> outlier_range{-1.0, 1.0};
  double truth_scale = 1.0;    // multiplies every ground-truth weight
  std::uint64_t seed = 0;
};

struct CompletionInstance {
  SparseObservations obs;
  KruskalModel truth;
  std::vector<std::size_t> outlier_offsets;  // row-major offsets, sorted
};

// Factor entries are i.i.d. standard normal; each term is stored as a unit
// atom with weight truth_scale * prod ||factor||. Throws when Omega is empty.
CompletionInstance gen_completion(const CompletionConfig& cfg);

KruskalModel random_kruskal(const Shape& dims, std::size_t rank, std::uint64_t seed);

TaskSet gen_mlmtl(std::size_t feature_dim, const Shape& task_dims, std::size_t cp_rank,
                  std::size_t samples_per_task, double noise, std::uint64_t seed,
                  KruskalModel* truth = nullptr);

}  // namespace homp
