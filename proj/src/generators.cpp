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

#include "homp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "homp/kernels.hpp"

namespace homp {
namespace {

void add_random_terms(KruskalModel& model, std::size_t rank, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (std::size_t r = 0; r < rank; ++r) {
    std::vector<std::vector<double>> factors;
    for (std::size_t n : model.dims()) {
      std::vector<double> f(n);
      for (double& x : f) x = normal(rng);
      factors.push_back(std::move(f));
    }
    auto [atom, norm] = RankOneAtom::from_unnormalized(std::move(factors));
    model.append(scale * norm, std::move(atom));
  }
}

std::vector<std::size_t> unravel(std::size_t off, const Shape& dims) {
  std::vector<std::size_t> idx(dims.size());
  for (std::size_t m = dims.size(); m-- > 0;) {
    idx[m] = off % dims[m];
    off /= dims[m];
  }
  return idx;
}

}  // namespace

KruskalModel random_kruskal(const Shape& dims, std::size_t rank, std::uint64_t seed) {
  check_shape(dims);
  std::mt19937_64 rng(seed);
  KruskalModel model(dims);
  add_random_terms(model, rank, 1.0, rng);
  return model;
}

CompletionInstance gen_completion(const CompletionConfig& cfg) {
  check_shape(cfg.dims);
  if (!(cfg.missing_ratio >= 0.0 && cfg.missing_ratio < 1.0)) {
    throw std::invalid_argument("missing_ratio must lie in [0, 1)");
  }
  if (!(cfg.outlier_frac >= 0.0 && cfg.outlier_frac <= 1.0)) {
    throw std::invalid_argument("outlier_frac must lie in [0, 1]");
  }
  if (cfg.noise < 0.0) throw std::invalid_argument("noise must be >= 0");
  if (cfg.outlier_range.first > cfg.outlier_range.second) throw std::invalid_argument("empty outlier range");

  std::mt19937_64 rng(cfg.seed);
  KruskalModel truth(cfg.dims);
  add_random_terms(truth, cfg.cp_rank, cfg.truth_scale, rng);

  const std::size_t total = volume(cfg.dims);
  const auto count = static_cast<std::size_t>(std::llround((1.0 - cfg.missing_ratio) * static_cast<double>(total)));
  if (count == 0) throw std::invalid_argument("missing_ratio leaves no observed entries");

  // Partial Fisher-Yates: the first `count` slots are a uniform sample.
  std::vector<std::size_t> perm(total);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  std::vector<std::size_t> offsets(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(offsets.begin(), offsets.end());

  std::vector<std::vector<std::size_t>> indices;
  indices.reserve(count);
  std::vector<double> values(count, 0.0);
  for (std::size_t e = 0; e < count; ++e) {
    auto idx = unravel(offsets[e], cfg.dims);
    for (const auto& term : truth.terms()) {
      double v = term.weight;
      for (std::size_t m = 0; m < idx.size(); ++m) v *= term.atom.factor(m)[idx[m]];
      values[e] += v;
    }
    indices.push_back(std::move(idx));
  }

  if (cfg.noise > 0.0) {
    std::normal_distribution<double> normal(0.0, cfg.noise);
    for (double& v : values) v += normal(rng);
  }

  std::vector<std::size_t> outliers;
  const auto num_outliers = static_cast<std::size_t>(std::llround(cfg.outlier_frac * static_cast<double>(count)));
  if (num_outliers > 0) {
    std::vector<std::size_t> slots(count);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t i = 0; i < num_outliers; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, count - 1);
      std::swap(slots[i], slots[pick(rng)]);
    }
    slots.resize(num_outliers);
    std::sort(slots.begin(), slots.end());
    std::uniform_real_distribution<double> draw(cfg.outlier_range.first, cfg.outlier_range.second);
    for (std::size_t s : slots) {
      values[s] = draw(rng);
      outliers.push_back(offsets[s]);
    }
  }

  return CompletionInstance{SparseObservations(cfg.dims, indices, std::move(values)), std::move(truth),
                            std::move(outliers)};
}

TaskSet gen_mlmtl(std::size_t feature_dim, const Shape& task_dims, std::size_t cp_rank,
                  std::size_t samples_per_task, double noise, std::uint64_t seed, KruskalModel* truth) {
  if (feature_dim == 0 || cp_rank == 0 || samples_per_task == 0) {
    throw std::invalid_argument("gen_mlmtl: D, rank and samples per task must be positive");
  }
  check_shape(task_dims);
  if (noise < 0.0) throw std::invalid_argument("noise must be >= 0");
  std::mt19937_64 rng(seed);
  Shape wdims{feature_dim};
  wdims.insert(wdims.end(), task_dims.begin(), task_dims.end());
  KruskalModel planted(wdims);
  add_random_terms(planted, cp_rank, 1.0, rng);

  TaskSet shape_only(feature_dim, task_dims, std::vector<Task>(volume(task_dims)));
  const auto w = task_weights(shape_only, planted);
  std::normal_distribution<double> normal;
  std::vector<Task> tasks;
  tasks.reserve(w.size());
  for (const auto& wt : w) {
    Task task{Matrix(samples_per_task, feature_dim), std::vector<double>(samples_per_task)};
    for (double& x : task.x.data()) x = normal(rng);
    kernels::gemv(task.x.data().data(), samples_per_task, feature_dim, wt.data(), task.y.data());
    if (noise > 0.0) {
      for (double& y : task.y) y += noise * normal(rng);
    }
    tasks.push_back(std::move(task));
  }
  if (truth != nullptr) *truth = std::move(planted);
  return TaskSet(feature_dim, task_dims, std::move(tasks));
}

}  // namespace homp
