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

#include "homp/mlmtl.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "homp/kernels.hpp"
#include "homp/linalg.hpp"

namespace homp {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> view(const Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

}  // namespace

TaskSet::TaskSet(std::size_t feature_dim, Shape task_dims, std::vector<Task> tasks)
    : feature_dim_(feature_dim), task_dims_(std::move(task_dims)), tasks_(std::move(tasks)) {
  if (feature_dim_ == 0) throw std::invalid_argument("feature dimension must be positive");
  check_shape(task_dims_);
  if (tasks_.size() != volume(task_dims_)) {
    throw std::invalid_argument("task count " + std::to_string(tasks_.size()) +
                                " does not match prod(task_dims) " + std::to_string(volume(task_dims_)));
  }
  for (const Task& t : tasks_) {
    if (t.x.rows() != t.y.size()) throw std::invalid_argument("task sample/target count mismatch");
    if (t.x.rows() > 0 && t.x.cols() != feature_dim_) throw std::invalid_argument("task feature dimension mismatch");
  }
}

Shape TaskSet::weight_dims() const {
  Shape d{feature_dim_};
  d.insert(d.end(), task_dims_.begin(), task_dims_.end());
  return d;
}

std::vector<std::size_t> TaskSet::task_index(std::size_t t) const {
  std::vector<std::size_t> idx(task_dims_.size());
  for (std::size_t m = task_dims_.size(); m-- > 0;) {
    idx[m] = t % task_dims_[m];
    t /= task_dims_[m];
  }
  return idx;
}

MlmtlObjective::MlmtlObjective(TaskSet tasks, LossFunction loss)
    : MlmtlObjective(std::move(tasks), loss, MlmtlMode::kRaw, 0.0) {}

MlmtlObjective::MlmtlObjective(TaskSet tasks, LossFunction loss, MlmtlMode mode, double lambda)
    : tasks_(std::move(tasks)), loss_(loss), mode_(mode), lambda_(lambda), dims_(tasks_.weight_dims()) {
  const std::size_t num_tasks = tasks_.num_tasks();
  const std::size_t dim = tasks_.feature_dim();
  design_.resize(num_tasks);
  std::vector<std::vector<double>> task_targets(num_tasks);

  if (mode_ == MlmtlMode::kRaw) {
    for (std::size_t t = 0; t < num_tasks; ++t) {
      design_[t] = tasks_.task(t).x;
      task_targets[t] = tasks_.task(t).y;
    }
  } else {
    if (lambda_ < 0.0 || !std::isfinite(lambda_)) throw std::invalid_argument("ridge lambda must be >= 0");
    for (std::size_t t = 0; t < num_tasks; ++t) {
      const Task& task = tasks_.task(t);
      if (task.x.rows() == 0) continue;  // empty tasks contribute nothing
      const auto x = view(task.x);
      const Eigen::Map<const Eigen::VectorXd> y(task.y.data(), static_cast<Eigen::Index>(task.y.size()));
      Eigen::MatrixXd gram = x.transpose() * x;
      gram.diagonal().array() += lambda_;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
      Eigen::VectorXd mu = eig.eigenvalues().cwiseMax(0.0);
      const double mu_max = mu.maxCoeff();
      if (lambda_ == 0.0 && (mu_max == 0.0 || mu.minCoeff() < 1e-12 * mu_max)) {
        throw std::invalid_argument("task " + std::to_string(t) +
                                    ": X^T X is singular; ridge reformulation needs lambda > 0");
      }
      const Eigen::MatrixXd& v = eig.eigenvectors();
      const Eigen::MatrixXd xhat = v * mu.cwiseSqrt().asDiagonal() * v.transpose();
      const Eigen::VectorXd z = v * mu.cwiseSqrt().cwiseInverse().asDiagonal() * (v.transpose() * (x.transpose() * y));
      Matrix design(dim, dim);
      for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
          // Symmetrize away round-off.
          design(r, c) = 0.5 * (xhat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +
                                xhat(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)));
        }
      }
      design_[t] = std::move(design);
      task_targets[t].assign(z.data(), z.data() + z.size());
      const double m_t = static_cast<double>(task.x.rows());
      ridge_constant_ += (y.squaredNorm() - z.squaredNorm()) / (2.0 * m_t);
    }
  }

  offsets_.assign(num_tasks + 1, 0);
  for (std::size_t t = 0; t < num_tasks; ++t) {
    const std::size_t m_t = tasks_.task(t).x.rows();
    const std::size_t rows = m_t == 0 ? 0 : design_[t].rows();
    offsets_[t + 1] = offsets_[t] + rows;
    for (std::size_t i = 0; i < rows; ++i) {
      targets_.push_back(task_targets[t][i]);
      weights_.push_back(1.0 / static_cast<double>(m_t));
    }
    if (rows > 0) lambda_max_ = std::max(lambda_max_, std::pow(linalg::largest_singular_value(design_[t]), 2));
  }
}

MlmtlObjective MlmtlObjective::ridge(TaskSet tasks, LossFunction loss, double lambda) {
  return MlmtlObjective(std::move(tasks), loss, MlmtlMode::kRidge, lambda);
}

std::span<const double> MlmtlObjective::task_targets(std::size_t t) const {
  return std::span<const double>(targets_).subspan(offsets_[t], offsets_[t + 1] - offsets_[t]);
}

std::vector<double> MlmtlObjective::measure(const RankOneAtom& atom) const {
  check_dims(atom.dims());
  std::vector<double> out(num_measurements(), 0.0);
  const auto& f0 = atom.factor(0);
  const std::size_t order = atom.order();
  for (std::size_t t = 0; t < tasks_.num_tasks(); ++t) {
    const std::size_t rows = offsets_[t + 1] - offsets_[t];
    if (rows == 0) continue;
    const auto idx = tasks_.task_index(t);
    double c = 1.0;
    for (std::size_t m = 1; m < order; ++m) c *= atom.factor(m)[idx[m - 1]];
    if (c == 0.0) continue;
    double* seg = out.data() + offsets_[t];
    kernels::gemv(design_[t].data().data(), rows, design_[t].cols(), f0.data(), seg);
    kernels::scale(seg, c, rows);
  }
  return out;
}

std::vector<double> MlmtlObjective::measure(const DenseTensor& w) const {
  check_dims(w.dims());
  std::vector<double> out(num_measurements(), 0.0);
  const std::size_t num_tasks = tasks_.num_tasks();
  const std::size_t dim = tasks_.feature_dim();
  std::vector<double> col(dim);
  for (std::size_t t = 0; t < num_tasks; ++t) {
    const std::size_t rows = offsets_[t + 1] - offsets_[t];
    if (rows == 0) continue;
    for (std::size_t d = 0; d < dim; ++d) col[d] = w.data()[d * num_tasks + t];
    kernels::gemv(design_[t].data().data(), rows, dim, col.data(), out.data() + offsets_[t]);
  }
  return out;
}

DenseTensor MlmtlObjective::adjoint(std::span<const double> m) const {
  if (m.size() != num_measurements()) throw std::invalid_argument("adjoint: measurement length mismatch");
  DenseTensor out(dims_);
  const std::size_t num_tasks = tasks_.num_tasks();
  const std::size_t dim = tasks_.feature_dim();
  std::vector<double> col(dim);
  auto data = out.data();
  for (std::size_t t = 0; t < num_tasks; ++t) {
    const std::size_t rows = offsets_[t + 1] - offsets_[t];
    if (rows == 0) continue;
    kernels::gemv_t(design_[t].data().data(), rows, dim, m.data() + offsets_[t], col.data());
    for (std::size_t d = 0; d < dim; ++d) data[d * num_tasks + t] = col[d];
  }
  return out;
}

MlmtlObjective build_ridge_reformulation(const TaskSet& tasks, double lambda, LossFunction loss) {
  return MlmtlObjective::ridge(tasks, loss, lambda);
}

double mlmtl_value(const MlmtlObjective& obj, const KruskalModel& model) { return obj.value(model); }

DenseTensor mlmtl_gradient(const MlmtlObjective& obj, const KruskalModel& model) {
  return obj.gradient(model);
}

std::vector<std::vector<double>> task_weights(const TaskSet& tasks, const KruskalModel& model) {
  if (model.dims() != tasks.weight_dims()) throw std::invalid_argument("task_weights: dims mismatch");
  const std::size_t dim = tasks.feature_dim();
  std::vector<std::vector<double>> w(tasks.num_tasks(), std::vector<double>(dim, 0.0));
  for (std::size_t t = 0; t < tasks.num_tasks(); ++t) {
    const auto idx = tasks.task_index(t);
    for (const auto& term : model.terms()) {
      double c = term.weight;
      for (std::size_t m = 1; m < term.atom.order(); ++m) c *= term.atom.factor(m)[idx[m - 1]];
      if (c != 0.0) kernels::axpy(c, term.atom.factor(0).data(), w[t].data(), dim);
    }
  }
  return w;
}

double ridge_ls_value(const TaskSet& tasks, double lambda, const KruskalModel& model) {
  const auto w = task_weights(tasks, model);
  double f = 0.0;
  std::vector<double> pred;
  for (std::size_t t = 0; t < tasks.num_tasks(); ++t) {
    const Task& task = tasks.task(t);
    const std::size_t m_t = task.x.rows();
    if (m_t == 0) continue;
    pred.resize(m_t);
    kernels::gemv(task.x.data().data(), m_t, task.x.cols(), w[t].data(), pred.data());
    double r2 = 0.0;
    for (std::size_t i = 0; i < m_t; ++i) r2 += (pred[i] - task.y[i]) * (pred[i] - task.y[i]);
    const double w2 = kernels::dot(w[t].data(), w[t].data(), w[t].size());
    f += 0.5 * (r2 + lambda * w2) / static_cast<double>(m_t);
  }
  return f;
}

}  // namespace homp
