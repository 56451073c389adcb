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

#include "homp/completion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "homp/kernels.hpp"

namespace homp {

SparseObservations::SparseObservations(Shape dims, const std::vector<std::vector<std::size_t>>& indices,
                                       std::vector<double> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
  check_shape(dims_);
  if (indices.size() != values_.size()) throw std::invalid_argument("index/value count mismatch");
  if (values_.empty()) throw std::invalid_argument("observation set is empty");
  for (std::size_t d : dims_) {
    if (d > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("extent too large");
  }
  const std::size_t n = dims_.size();
  mode_idx_.assign(n, std::vector<std::uint32_t>(values_.size()));
  offsets_.resize(values_.size());
  for (std::size_t e = 0; e < values_.size(); ++e) {
    const auto& idx = indices[e];
    if (idx.size() != n) throw std::invalid_argument("observation index has wrong order");
    std::size_t off = 0;
    for (std::size_t m = 0; m < n; ++m) {
      if (idx[m] >= dims_[m]) throw std::invalid_argument("observation index out of range");
      mode_idx_[m][e] = static_cast<std::uint32_t>(idx[m]);
      off = off * dims_[m] + idx[m];
    }
    offsets_[e] = off;
  }
  std::vector<std::size_t> sorted = offsets_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("duplicate observation index");
  }
}

CompletionObjective::CompletionObjective(SparseObservations obs, LossFunction loss)
    : obs_(std::move(obs)), loss_(loss), unit_weights_(obs_.size(), 1.0) {}

std::vector<double> CompletionObjective::measure(const RankOneAtom& atom) const {
  check_dims(atom.dims());
  std::vector<double> out(obs_.size(), 1.0);
  for (std::size_t m = 0; m < obs_.order(); ++m) {
    kernels::gather_mul(atom.factor(m).data(), obs_.mode_indices(m).data(), out.data(), out.size());
  }
  return out;
}

std::vector<double> CompletionObjective::measure(const DenseTensor& w) const {
  check_dims(w.dims());
  std::vector<double> out(obs_.size());
  const auto offs = obs_.offsets();
  const auto data = w.data();
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = data[offs[e]];
  return out;
}

DenseTensor CompletionObjective::adjoint(std::span<const double> m) const {
  if (m.size() != obs_.size()) throw std::invalid_argument("adjoint: measurement length mismatch");
  DenseTensor out(obs_.dims());
  auto data = out.data();
  const auto offs = obs_.offsets();
  for (std::size_t e = 0; e < m.size(); ++e) data[offs[e]] = m[e];
  return out;
}

double completion_value(const CompletionObjective& obj, const KruskalModel& model) {
  return obj.value(model);
}

DenseTensor completion_gradient(const CompletionObjective& obj, const KruskalModel& model) {
  return obj.gradient(model);
}

double relative_error(const KruskalModel& model, const KruskalModel& truth) {
  return relative_error_excluding(model, truth, {});
}

double relative_error_excluding(const KruskalModel& model, const KruskalModel& truth,
                                std::span<const std::size_t> excluded_offsets) {
  if (model.dims() != truth.dims()) throw std::invalid_argument("relative_error: dims mismatch");
  const DenseTensor w = kruskal_to_dense(model);
  const DenseTensor b = kruskal_to_dense(truth);
  std::vector<bool> skip(w.size(), false);
  for (std::size_t off : excluded_offsets) skip.at(off) = true;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (skip[i]) continue;
    const double diff = w.data()[i] - b.data()[i];
    num += diff * diff;
    den += b.data()[i] * b.data()[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

double relative_error_observed(const CompletionObjective& obj, const KruskalModel& model) {
  const std::vector<double> pred = obj.predict(model);
  const auto b = obj.targets();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    num += (pred[i] - b[i]) * (pred[i] - b[i]);
    den += b[i] * b[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace homp
