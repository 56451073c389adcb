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

// Objectives of the form
//
//   F(W) = sum_i w_i * l(<a_i, W> - b_i)
//
// over a linear measurement operator W -> (<a_i, W>)_i. Both tensor
// completion (a_i picks one entry, w_i = 1) and multilinear multitask
// regression (a_i is a sample row placed in one task column, w_i = 1/m_t)
// have this shape, so the solver only ever works in measurement space.

#include <cstddef>
#include <span>
#include <vector>

#include "homp/losses.hpp"
#include "homp/tensor.hpp"

namespace homp {

class Objective {
 public:
  virtual ~Objective() = default;

  virtual const Shape& dims() const = 0;
  virtual std::size_t num_measurements() const = 0;

  // (<a_i, S>)_i for a rank-one atom, without materializing S.
  virtual std::vector<double> measure(const RankOneAtom& atom) const = 0;
  virtual std::vector<double> measure(const DenseTensor& w) const = 0;
  // sum_i m_i a_i.
  virtual DenseTensor adjoint(std::span<const double> m) const = 0;

  virtual std::span<const double> targets() const = 0;
  virtual std::span<const double> weights() const = 0;
  virtual const LossFunction& loss() const = 0;
  // Lipschitz constant of the gradient.
  virtual double lipschitz() const = 0;

  std::vector<double> predict(const KruskalModel& model) const;
  double value_at(std::span<const double> prediction) const;
  DenseTensor gradient_at(std::span<const double> prediction) const;

  double value(const KruskalModel& model) const { return value_at(predict(model)); }
  DenseTensor gradient(const KruskalModel& model) const { return gradient_at(predict(model)); }
  double value(const DenseTensor& w) const { return value_at(measure(w)); }
  DenseTensor gradient(const DenseTensor& w) const { return gradient_at(measure(w)); }

  // sum_i w_i a_i b_i over measurement vectors.
  double weighted_dot(std::span<const double> a, std::span<const double> b) const;

  // Smallest psi(residual) over all measurements; the q diagnostic of the
  // general-loss convergence bounds.
  double min_psi(std::span<const double> prediction) const;

 protected:
  void check_dims(const Shape& d) const;
};

}  // namespace homp
