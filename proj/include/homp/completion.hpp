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

// Tensor completion: F(W) = sum over observed entries of l(W_i - B_i).

#include <cstdint>
#include <span>
#include <vector>

#include "homp/objective.hpp"

namespace homp {

// The observed index set with its values, stored mode-major so the per-mode
// factor lookups of a rank-one atom vectorize.
class SparseObservations {
 public:
  // `indices` holds one 0-based multi-index per entry. Throws
  // std::invalid_argument for out-of-range or duplicate indices and for an
  // empty entry list.
  SparseObservations(Shape dims, const std::vector<std::vector<std::size_t>>& indices,
                     std::vector<double> values);

  const Shape& dims() const { return dims_; }
  std::size_t order() const { return dims_.size(); }
  std::size_t size() const { return values_.size(); }

  std::span<const std::uint32_t> mode_indices(std::size_t mode) const { return mode_idx_[mode]; }
  std::size_t index(std::size_t entry, std::size_t mode) const { return mode_idx_[mode][entry]; }
  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const double> values() const { return values_; }

 private:
  Shape dims_;
  std::vector<std::vector<std::uint32_t>> mode_idx_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

class CompletionObjective final : public Objective {
 public:
  CompletionObjective(SparseObservations obs, LossFunction loss);

  const SparseObservations& observations() const { return obs_; }

  const Shape& dims() const override { return obs_.dims(); }
  std::size_t num_measurements() const override { return obs_.size(); }
  std::vector<double> measure(const RankOneAtom& atom) const override;
  std::vector<double> measure(const DenseTensor& w) const override;
  DenseTensor adjoint(std::span<const double> m) const override;
  std::span<const double> targets() const override { return obs_.values(); }
  std::span<const double> weights() const override { return unit_weights_; }
  const LossFunction& loss() const override { return loss_; }
  double lipschitz() const override { return 1.0; }

 private:
  SparseObservations obs_;
  LossFunction loss_;
  std::vector<double> unit_weights_;
};

// Evaluates the model on observed entries only: O(|Omega| * rank * order).
double completion_value(const CompletionObjective& obj, const KruskalModel& model);
// Dense gradient, zero off the observed set, psi(r) * r on it.
DenseTensor completion_gradient(const CompletionObjective& obj, const KruskalModel& model);

// ||W - B||_F / ||B||_F over every entry of the tensor.
double relative_error(const KruskalModel& model, const KruskalModel& truth);
// Same, skipping the given storage offsets (e.g. outlier positions).
double relative_error_excluding(const KruskalModel& model, const KruskalModel& truth,
                                std::span<const std::size_t> excluded_offsets);
// ||W_Omega - B_Omega|| / ||B_Omega|| against the observed values.
double relative_error_observed(const CompletionObjective& obj, const KruskalModel& model);

}  // namespace homp
