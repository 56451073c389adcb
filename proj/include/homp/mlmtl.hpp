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

// Multilinear multitask regression. Task t (a multi-index over task_dims,
// lexicographic) owns the weight vector w^t, the column t of the mode-1
// unfolding of the (D, n_1, ..., n_N) weight tensor.
//
//   raw:    F(W) = sum_t m_t^-1 sum_i l(<x_i^t, w^t> - y_i^t)
//   ridge:  G(W) = sum_t m_t^-1 sum_i l(<xhat_i^t, w^t> - z_i^t)
//
// with xhat^t = sqrt(X^T X + lambda I) and z^t = xhat^-1 X^T y. For the
// least-squares loss G(W) + C equals the ridge-regularized raw objective.

#include <cstddef>
#include <vector>

#include "homp/objective.hpp"

namespace homp {

struct Task {
  Matrix x;               // m_t x D
  std::vector<double> y;  // m_t
};

class TaskSet {
 public:
  // tasks.size() must equal prod(task_dims); every task has D columns.
  TaskSet(std::size_t feature_dim, Shape task_dims, std::vector<Task> tasks);

  std::size_t feature_dim() const { return feature_dim_; }
  const Shape& task_dims() const { return task_dims_; }
  std::size_t num_tasks() const { return tasks_.size(); }
  const Task& task(std::size_t t) const { return tasks_[t]; }
  const std::vector<Task>& tasks() const { return tasks_; }
  // (D, n_1, ..., n_N)
  Shape weight_dims() const;
  // Multi-index of task t over task_dims.
  std::vector<std::size_t> task_index(std::size_t t) const;

 private:
  std::size_t feature_dim_;
  Shape task_dims_;
  std::vector<Task> tasks_;
};

enum class MlmtlMode { kRaw, kRidge };

class MlmtlObjective final : public Objective {
 public:
  MlmtlObjective(TaskSet tasks, LossFunction loss);

  // Ridge reformulation. lambda > 0, or lambda == 0 with every X^T X
  // positive definite; throws std::invalid_argument otherwise.
  static MlmtlObjective ridge(TaskSet tasks, LossFunction loss, double lambda);

  MlmtlMode mode() const { return mode_; }
  double lambda() const { return lambda_; }
  // C = sum_t (2 m_t)^-1 (||y^t||^2 - ||z^t||^2); zero in raw mode.
  double ridge_constant() const { return ridge_constant_; }
  const TaskSet& tasks() const { return tasks_; }
  // Design matrix used for task t: X^t (raw) or xhat^t (ridge).
  const Matrix& design(std::size_t t) const { return design_[t]; }
  std::span<const double> task_targets(std::size_t t) const;

  const Shape& dims() const override { return dims_; }
  std::size_t num_measurements() const override { return targets_.size(); }
  std::vector<double> measure(const RankOneAtom& atom) const override;
  std::vector<double> measure(const DenseTensor& w) const override;
  DenseTensor adjoint(std::span<const double> m) const override;
  std::span<const double> targets() const override { return targets_; }
  std::span<const double> weights() const override { return weights_; }
  const LossFunction& loss() const override { return loss_; }
  // max_t ||design_t||_2^2
  double lipschitz() const override { return lambda_max_; }

 private:
  MlmtlObjective(TaskSet tasks, LossFunction loss, MlmtlMode mode, double lambda);
  void finalize();

  TaskSet tasks_;
  LossFunction loss_;
  MlmtlMode mode_;
  double lambda_ = 0.0;
  Shape dims_;
  std::vector<Matrix> design_;
  std::vector<std::size_t> offsets_;  // measurement offset of each task, size T + 1
  std::vector<double> targets_;
  std::vector<double> weights_;
  double ridge_constant_ = 0.0;
  double lambda_max_ = 0.0;
};

MlmtlObjective build_ridge_reformulation(const TaskSet& tasks, double lambda,
                                         LossFunction loss = LossFunction::least_squares());

double mlmtl_value(const MlmtlObjective& obj, const KruskalModel& model);
DenseTensor mlmtl_gradient(const MlmtlObjective& obj, const KruskalModel& model);

// 1/2 sum_t m_t^-1 (||X^t w^t - y^t||^2 + lambda ||w^t||^2), computed on the
// raw data.
double ridge_ls_value(const TaskSet& tasks, double lambda, const KruskalModel& model);

// Task weight vectors w^t extracted from a Kruskal model without densifying.
std::vector<std::vector<double>> task_weights(const TaskSet& tasks, const KruskalModel& model);

}  // namespace homp
