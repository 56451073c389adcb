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

#include "homp/objective.hpp"

#include <algorithm>
#include <stdexcept>

#include "homp/kernels.hpp"

namespace homp {

void Objective::check_dims(const Shape& d) const {
  if (d != dims()) throw std::invalid_argument("model dims do not match objective dims");
}

std::vector<double> Objective::predict(const KruskalModel& model) const {
  check_dims(model.dims());
  std::vector<double> pred(num_measurements(), 0.0);
  for (const auto& term : model.terms()) {
    if (term.weight == 0.0) continue;
    const std::vector<double> s = measure(term.atom);
    kernels::axpy(term.weight, s.data(), pred.data(), pred.size());
  }
  return pred;
}

double Objective::value_at(std::span<const double> prediction) const {
  const auto b = targets();
  const auto w = weights();
  const LossFunction& l = loss();
  double f = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) f += w[i] * l.eval(prediction[i] - b[i]);
  return f;
}

DenseTensor Objective::gradient_at(std::span<const double> prediction) const {
  const auto b = targets();
  const auto w = weights();
  const LossFunction& l = loss();
  std::vector<double> m(prediction.size());
  for (std::size_t i = 0; i < prediction.size(); ++i) m[i] = w[i] * l.derivative(prediction[i] - b[i]);
  return adjoint(m);
}

double Objective::weighted_dot(std::span<const double> a, std::span<const double> b) const {
  const auto w = weights();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

double Objective::min_psi(std::span<const double> prediction) const {
  const auto b = targets();
  double q = 1.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) q = std::min(q, loss().psi(prediction[i] - b[i]));
  return q;
}

}  // namespace homp
