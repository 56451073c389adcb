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

#include "homp/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace homp::oracle {
namespace {

using Factors = std::vector<std::vector<double>>;

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// v_i = sum over all entries with index i in `mode` of a * prod_{j != mode} x_j.
std::vector<double> contract_all_but(const DenseTensor& a, const Factors& x, std::size_t mode) {
  const Shape& dims = a.dims();
  std::vector<double> v(dims[mode], 0.0);
  std::vector<std::size_t> idx(dims.size(), 0);
  const auto data = a.data();
  for (std::size_t off = 0; off < data.size(); ++off) {
    double w = data[off];
    for (std::size_t j = 0; j < dims.size(); ++j) {
      if (j != mode) w *= x[j][idx[j]];
    }
    v[idx[mode]] += w;
    for (std::size_t j = dims.size(); j-- > 0;) {
      if (++idx[j] < dims[j]) break;
      idx[j] = 0;
    }
  }
  return v;
}

Eigen::MatrixXd mode_unfolding(const DenseTensor& a, std::size_t mode) {
  const Shape& dims = a.dims();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dims[mode]),
                                            static_cast<Eigen::Index>(a.size() / dims[mode]));
  std::vector<std::size_t> idx(dims.size(), 0);
  const auto data = a.data();
  for (std::size_t off = 0; off < data.size(); ++off) {
    std::size_t col = 0;
    for (std::size_t j = 0; j < dims.size(); ++j) {
      if (j != mode) col = col * dims[j] + idx[j];
    }
    m(static_cast<Eigen::Index>(idx[mode]), static_cast<Eigen::Index>(col)) = data[off];
    for (std::size_t j = dims.size(); j-- > 0;) {
      if (++idx[j] < dims[j]) break;
      idx[j] = 0;
    }
  }
  return m;
}

Factors hosvd_start(const DenseTensor& a) {
  Factors x;
  for (std::size_t m = 0; m < a.order(); ++m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mode_unfolding(a, m), Eigen::ComputeThinU);
    const Eigen::VectorXd u = svd.matrixU().col(0);
    x.emplace_back(u.data(), u.data() + u.size());
  }
  return x;
}

Factors random_start(const Shape& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Factors x;
  for (std::size_t n : dims) {
    std::vector<double> f(n);
    for (double& v : f) v = normal(rng);
    const double nr = norm(f);
    for (double& v : f) v /= nr;
    x.push_back(std::move(f));
  }
  return x;
}

// Alternating exact best responses; returns the final contraction value.
double ascend(const DenseTensor& a, Factors& x, const OracleConfig& cfg) {
  double value = 0.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    double next = 0.0;
    for (std::size_t m = 0; m < a.order(); ++m) {
      std::vector<double> v = contract_all_but(a, x, m);
      const double nv = norm(v);
      if (nv == 0.0) return 0.0;
      for (double& e : v) e /= nv;
      x[m] = std::move(v);
      next = nv;
    }
    const bool done = std::abs(next - value) <= cfg.tol * std::max(next, 1.0);
    value = next;
    if (done) break;
  }
  return value;
}

}  // namespace

SpectralOracleResult spectral_norm_bruteforce(const DenseTensor& a, const OracleConfig& cfg) {
  if (cfg.starts < 1) throw std::invalid_argument("oracle needs at least one start");
  if (a.size() > kMaxBruteForceSize) {
    throw std::invalid_argument("oracle size guard: " + std::to_string(a.size()) + " entries > " +
                                std::to_string(kMaxBruteForceSize));
  }
  double best = -1.0;
  Factors best_x;
  for (int s = 0; s < cfg.starts; ++s) {
    Factors x = s == 0 ? hosvd_start(a) : random_start(a.dims(), cfg.seed * 1000003ULL + static_cast<std::uint64_t>(s));
    const double v = ascend(a, x, cfg);
    if (v > best) {
      best = v;
      best_x = std::move(x);
    }
  }
  if (best <= 0.0) {
    best = 0.0;
    best_x = random_start(a.dims(), cfg.seed);
  }
  return SpectralOracleResult{best, RankOneAtom(std::move(best_x), best)};
}

FullSvd svd_small(const Matrix& m) {
  if (std::min(m.rows(), m.cols()) > 64) throw std::invalid_argument("svd_small size guard: min dimension > 64");
  const auto rows = static_cast<Eigen::Index>(m.rows());
  const auto cols = static_cast<Eigen::Index>(m.cols());
  Eigen::MatrixXd e(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) e(r, c) = m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index k = std::min(rows, cols);
  FullSvd out{Matrix(m.rows(), static_cast<std::size_t>(k)), {}, Matrix(m.cols(), static_cast<std::size_t>(k))};
  for (Eigen::Index j = 0; j < k; ++j) {
    out.s.push_back(svd.singularValues()(j));
    for (Eigen::Index r = 0; r < rows; ++r) out.u(static_cast<std::size_t>(r), static_cast<std::size_t>(j)) = svd.matrixU()(r, j);
    for (Eigen::Index c = 0; c < cols; ++c) out.v(static_cast<std::size_t>(c), static_cast<std::size_t>(j)) = svd.matrixV()(c, j);
  }
  return out;
}

GridResult grid_line_search(const Objective& obj, const KruskalModel& model, const RankOneAtom& atom,
                            double lo, double hi, int points) {
  if (points < 3) throw std::invalid_argument("grid_line_search needs >= 3 points");
  const std::vector<double> base = obj.predict(model);
  const std::vector<double> s = obj.measure(atom);
  std::vector<double> p(base.size());
  GridResult best{lo, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < points; ++i) {
    const double alpha = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = base[j] + alpha * s[j];
    const double v = obj.value_at(p);
    if (v < best.value) best = {alpha, v};
  }
  return best;
}

double directional_fd(const std::function<double(const DenseTensor&)>& f, const DenseTensor& x,
                      const DenseTensor& direction, double h) {
  if (x.dims() != direction.dims()) throw std::invalid_argument("directional_fd: dims mismatch");
  DenseTensor plus = x, minus = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus.data()[i] += h * direction.data()[i];
    minus.data()[i] -= h * direction.data()[i];
  }
  return (f(plus) - f(minus)) / (2.0 * h);
}

}  // namespace homp::oracle
