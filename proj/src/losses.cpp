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

#include "homp/losses.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace homp {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("invalid loss parameter '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

LossFunction::LossFunction(LossKind kind, double scale, double p) : kind_(kind), scale_(scale), p_(p) {}

LossFunction LossFunction::least_squares() { return {LossKind::kLeastSquares, 1.0, 2.0}; }

LossFunction LossFunction::huber(double delta) {
  require_positive(delta, "huber delta");
  return {LossKind::kHuber, delta, 1.0};
}

LossFunction LossFunction::generalized_huber(double delta, double p) {
  require_positive(delta, "generalized huber delta");
  if (!(p > 0.0 && p <= 2.0)) throw std::invalid_argument("generalized huber needs 0 < p <= 2");
  return {LossKind::kGeneralizedHuber, delta, p};
}

LossFunction LossFunction::l1l2() { return {LossKind::kL1L2, 1.0, 1.0}; }

LossFunction LossFunction::fair(double sigma) {
  require_positive(sigma, "fair sigma");
  return {LossKind::kFair, sigma, 1.0};
}

LossFunction LossFunction::cauchy(double sigma) {
  require_positive(sigma, "cauchy sigma");
  return {LossKind::kCauchy, sigma, 1.0};
}

LossFunction LossFunction::parse(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  const std::string_view name = parts[0];
  auto arg = [&](std::size_t i, double fallback) {
    return parts.size() > i ? parse_number(parts[i]) : fallback;
  };
  auto max_args = [&](std::size_t n) {
    if (parts.size() > n + 1) throw std::invalid_argument("too many parameters in loss '" + std::string(spec) + "'");
  };
  if (name == "ls") {
    max_args(0);
    return least_squares();
  }
  if (name == "huber") {
    max_args(1);
    return huber(arg(1, kDefaultDelta));
  }
  if (name == "ghuber") {
    max_args(2);
    return generalized_huber(arg(1, kDefaultDelta), arg(2, kDefaultP));
  }
  if (name == "l1l2") {
    max_args(0);
    return l1l2();
  }
  if (name == "fair") {
    max_args(1);
    return fair(arg(1, kDefaultFairSigma));
  }
  if (name == "cauchy") {
    max_args(1);
    return cauchy(arg(1, kDefaultCauchySigma));
  }
  throw std::invalid_argument("unknown loss '" + std::string(spec) + "'");
}

double LossFunction::eval(double t) const {
  const double a = std::abs(t);
  switch (kind_) {
    case LossKind::kLeastSquares:
      return 0.5 * t * t;
    case LossKind::kHuber:
      return a <= scale_ ? 0.5 * t * t : scale_ * a - 0.5 * scale_ * scale_;
    case LossKind::kGeneralizedHuber: {
      if (a <= scale_) return 0.5 * t * t;
      const double dp = std::pow(scale_, p_);
      return std::pow(scale_, 2.0 - p_) * (std::pow(a, p_) / p_ + dp * (0.5 - 1.0 / p_));
    }
    case LossKind::kL1L2:
      // 2(sqrt(1 + t^2/2) - 1) without cancellation.
      return t * t / (std::sqrt(1.0 + 0.5 * t * t) + 1.0);
    case LossKind::kFair: {
      const double u = a / scale_;
      return scale_ * scale_ * (u - std::log1p(u));
    }
    case LossKind::kCauchy:
      return 0.5 * scale_ * scale_ * std::log1p(t * t / (scale_ * scale_));
  }
  return 0.0;
}

double LossFunction::derivative(double t) const { return psi(t) * t; }

double LossFunction::psi(double t) const {
  const double a = std::abs(t);
  switch (kind_) {
    case LossKind::kLeastSquares:
      return 1.0;
    case LossKind::kHuber:
      return a <= scale_ ? 1.0 : scale_ / a;
    case LossKind::kGeneralizedHuber:
      return a <= scale_ ? 1.0 : std::pow(scale_ / a, 2.0 - p_);
    case LossKind::kL1L2:
      return 1.0 / std::sqrt(1.0 + 0.5 * t * t);
    case LossKind::kFair:
      return 1.0 / (1.0 + a / scale_);
    case LossKind::kCauchy:
      return 1.0 / (1.0 + t * t / (scale_ * scale_));
  }
  return 1.0;
}

std::string LossFunction::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case LossKind::kLeastSquares: os << "ls"; break;
    case LossKind::kHuber: os << "huber:" << scale_; break;
    case LossKind::kGeneralizedHuber: os << "ghuber:" << scale_ << ':' << p_; break;
    case LossKind::kL1L2: os << "l1l2"; break;
    case LossKind::kFair: os << "fair:" << scale_; break;
    case LossKind::kCauchy: os << "cauchy:" << scale_; break;
  }
  return os.str();
}

}  // namespace homp
