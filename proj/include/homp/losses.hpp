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

// Even, bounded-curvature scalar losses l(t) with derivative l'(t) and
// weight psi(t) = l'(t) / t (psi(0) = 1). Every member satisfies
// 0 <= l(t) <= t^2/2, |l'(s) - l'(t)| <= |s - t| and 0 <= psi <= 1.

#include <string>
#include <string_view>

namespace homp {

enum class LossKind { kLeastSquares, kHuber, kGeneralizedHuber, kL1L2, kFair, kCauchy };

class LossFunction {
 public:
  static constexpr double kDefaultDelta = 1.0;
  static constexpr double kDefaultCauchySigma = 0.08;
  static constexpr double kDefaultFairSigma = 1.0;
  static constexpr double kDefaultP = 1.0;

  static LossFunction least_squares();
  static LossFunction huber(double delta = kDefaultDelta);
  // 0 < p <= 2.
  static LossFunction generalized_huber(double delta = kDefaultDelta, double p = kDefaultP);
  static LossFunction l1l2();
  static LossFunction fair(double sigma = kDefaultFairSigma);
  static LossFunction cauchy(double sigma = kDefaultCauchySigma);

  // Parses `ls`, `huber[:d]`, `ghuber[:d[:p]]`, `l1l2`, `fair[:s]`,
  // `cauchy[:s]`. Throws std::invalid_argument on malformed input.
  static LossFunction parse(std::string_view spec);

  LossKind kind() const { return kind_; }
  // delta for the Huber family, sigma for fair / cauchy.
  double scale() const { return scale_; }
  double p() const { return p_; }
  bool is_least_squares() const { return kind_ == LossKind::kLeastSquares; }

  double eval(double t) const;
  double derivative(double t) const;
  double psi(double t) const;

  std::string to_string() const;

 private:
  LossFunction(LossKind kind, double scale, double p);

  LossKind kind_;
  double scale_;
  double p_;
};

}  // namespace homp
