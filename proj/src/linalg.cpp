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

#include "homp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "homp/kernels.hpp"

namespace homp::linalg {
namespace {

constexpr int kMaxSweeps = 80;
constexpr double kOrthoTol = 1e-15;

// One-sided Jacobi on the columns of a tall matrix (rows >= cols), stored as
// column vectors.
Svd svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<std::vector<double>> w(n, std::vector<double>(m));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) w[c][r] = a(r, c);
  }
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  auto rotate = [](std::vector<double>& x, std::vector<double>& y, double c, double s) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double xi = x[k];
      const double yi = y[k];
      x[k] = c * xi - s * yi;
      y[k] = s * xi + c * yi;
    }
  };

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double alpha = kernels::dot(w[i].data(), w[i].data(), m);
        const double beta = kernels::dot(w[j].data(), w[j].data(), m);
        const double gamma = kernels::dot(w[i].data(), w[j].data(), m);
        if (gamma == 0.0 || std::abs(gamma) <= kOrthoTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(w[i], w[j], c, s);
        rotate(v[i], v[j], c, s);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t k = 0; k < n; ++k) sigma[k] = norm2(w[k]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out{Matrix(m, n), std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.s[k] = sigma[src];
    for (std::size_t r = 0; r < m; ++r) out.u(r, k) = sigma[src] > 0.0 ? w[src][r] / sigma[src] : 0.0;
    for (std::size_t r = 0; r < n; ++r) out.v(r, k) = v[src][r];
  }
  return out;
}

}  // namespace

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x.data(), x.data(), x.size())); }

void normalize(std::vector<double>& x) {
  const double n = norm2(x);
  if (n > 0.0) kernels::scale(x.data(), 1.0 / n, x.size());
}

Svd svd_jacobi(const Matrix& a) {
  if (a.rows() >= a.cols()) return svd_tall(a);
  Svd t = svd_tall(a.transposed());
  return {std::move(t.v), std::move(t.s), std::move(t.u)};
}

void canonicalize_sign(std::vector<double>& u, std::vector<double>& v) {
  for (double x : u) {
    if (x == 0.0) continue;
    if (x < 0.0) {
      for (double& e : u) e = -e;
      for (double& e : v) e = -e;
    }
    return;
  }
}

SingularPair leading_pair_exact(const Matrix& a) {
  SingularPair p;
  p.u.assign(a.rows(), 0.0);
  p.v.assign(a.cols(), 0.0);
  // Row and column vectors are trivial; avoid the Jacobi machinery.
  if (a.rows() == 1 || a.cols() == 1) {
    const double s = a.frobenius_norm();
    if (s == 0.0) {
      p.u[0] = p.v[0] = 1.0;
      return p;
    }
    p.sigma = s;
    if (a.rows() == 1) {
      p.u[0] = 1.0;
      for (std::size_t c = 0; c < a.cols(); ++c) p.v[c] = a(0, c) / s;
    } else {
      p.v[0] = 1.0;
      for (std::size_t r = 0; r < a.rows(); ++r) p.u[r] = a(r, 0) / s;
    }
    canonicalize_sign(p.u, p.v);
    return p;
  }
  const Svd svd = svd_jacobi(a);
  if (svd.s.empty() || svd.s[0] == 0.0) {
    p.u[0] = p.v[0] = 1.0;
    return p;
  }
  p.sigma = svd.s[0];
  for (std::size_t r = 0; r < a.rows(); ++r) p.u[r] = svd.u(r, 0);
  for (std::size_t r = 0; r < a.cols(); ++r) p.v[r] = svd.v(r, 0);
  normalize(p.u);
  normalize(p.v);
  canonicalize_sign(p.u, p.v);
  return p;
}

Matrix small_gram(const Matrix& a) {
  if (a.cols() <= a.rows()) {
    const Matrix t = a.transposed();
    const std::size_t k = t.rows();
    Matrix g(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        g(i, j) = g(j, i) = kernels::dot(t.row(i).data(), t.row(j).data(), t.cols());
      }
    }
    return g;
  }
  const std::size_t k = a.rows();
  Matrix g(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      g(i, j) = g(j, i) = kernels::dot(a.row(i).data(), a.row(j).data(), a.cols());
    }
  }
  return g;
}

double largest_singular_value(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return a.frobenius_norm();
  if (std::min(a.rows(), a.cols()) <= 64) {
    const Svd s = svd_jacobi(small_gram(a));
    return std::sqrt(std::max(0.0, s.s[0]));
  }
  // Long power iteration from a fixed start.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  std::vector<double> v(a.cols());
  for (double& x : v) x = normal(rng);
  normalize(v);
  std::vector<double> u(a.rows());
  double sigma = 0.0;
  for (int it = 0; it < 1000; ++it) {
    kernels::gemv(a.data().data(), a.rows(), a.cols(), v.data(), u.data());
    normalize(u);
    kernels::gemv_t(a.data().data(), a.rows(), a.cols(), u.data(), v.data());
    const double s = norm2(v);
    if (s == 0.0) return 0.0;
    kernels::scale(v.data(), 1.0 / s, v.size());
    if (std::abs(s - sigma) <= 1e-14 * s) {
      sigma = s;
      break;
    }
    sigma = s;
  }
  return sigma;
}

double spectral_norm_upper_bound(const Matrix& a, int squarings, std::size_t max_gram) {
  const double frob = a.frobenius_norm();
  if (frob == 0.0) return 0.0;
  if (std::min(a.rows(), a.cols()) > max_gram) return frob;
  Matrix b = small_gram(a);
  const std::size_t k = b.rows();
  double c = b.frobenius_norm();
  kernels::scale(b.data().data(), 1.0 / c, b.data().size());
  // log ||G^p||_F with p = 2^j, tracked to avoid overflow.
  double log_norm = std::log(c);
  double power = 1.0;
  for (int j = 0; j < squarings; ++j) {
    Matrix sq(k, k);
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t col = 0; col < k; ++col) {
        double s = 0.0;
        for (std::size_t t = 0; t < k; ++t) s += b(r, t) * b(t, col);
        sq(r, col) = s;
      }
    }
    c = sq.frobenius_norm();
    if (c == 0.0) break;
    kernels::scale(sq.data().data(), 1.0 / c, sq.data().size());
    b = std::move(sq);
    log_norm = 2.0 * log_norm + std::log(c);
    power *= 2.0;
  }
  // lambda_1(G) <= ||G^p||_F^(1/p); sigma_1 = sqrt(lambda_1).
  const double bound = std::exp(log_norm / (2.0 * power));
  return std::min(frob, bound);
}

}  // namespace homp::linalg
