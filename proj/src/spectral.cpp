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

#include "homp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "homp/kernels.hpp"
#include "homp/linalg.hpp"

namespace homp {
namespace {

// Matrices up to this size on the short side get an exact Jacobi SVD.
constexpr std::size_t kExactPairLimit = 32;
constexpr int kRefineIters = 500;

Matrix as_matrix(std::span<const double> data, std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, std::vector<double>(data.begin(), data.end()));
}

// Power iteration from a given right vector; used where exact SVD is too
// large. Each step cannot decrease ||m v||.
LeadingPair power_from(std::span<const double> data, std::size_t rows, std::size_t cols,
                       std::vector<double> v, int max_iters, double tol) {
  const double* a = data.data();
  std::vector<double> u(rows);
  double prev = 0.0;
  int it = 0;
  for (; it < max_iters; ++it) {
    kernels::gemv(a, rows, cols, v.data(), u.data());
    if (linalg::norm2(u) == 0.0) break;
    linalg::normalize(u);
    kernels::gemv_t(a, rows, cols, u.data(), v.data());
    const double s = linalg::norm2(v);
    if (s == 0.0) break;
    kernels::scale(v.data(), 1.0 / s, cols);
    if (std::abs(s - prev) <= tol * s) {
      ++it;
      break;
    }
    prev = s;
  }
  kernels::gemv(a, rows, cols, v.data(), u.data());
  LeadingPair p;
  p.sigma = linalg::norm2(u);
  if (p.sigma > 0.0) kernels::scale(u.data(), 1.0 / p.sigma, rows);
  p.u = std::move(u);
  p.v = std::move(v);
  p.iterations = it;
  linalg::canonicalize_sign(p.u, p.v);
  return p;
}

// Leading pair of a small matrix for step 3, the base case and BCU. Exact
// when the short side is at most kExactPairLimit; otherwise a long power
// iteration started from `start` (or e_1). Returns alpha = 1 when exact.
LeadingPair small_pair(const Matrix& m, const std::vector<double>* start) {
  if (std::min(m.rows(), m.cols()) <= kExactPairLimit) {
    linalg::SingularPair sp = linalg::leading_pair_exact(m);
    LeadingPair p;
    p.u = std::move(sp.u);
    p.v = std::move(sp.v);
    p.sigma = sp.sigma;
    p.alpha = 1.0;
    p.sigma_upper = sp.sigma;
    return p;
  }
  std::vector<double> v0 = start ? *start : std::vector<double>(m.cols(), 0.0);
  if (!start) v0[0] = 1.0;
  LeadingPair p = power_from(m.data(), m.rows(), m.cols(), std::move(v0), kRefineIters, 1e-14);
  p.sigma_upper = linalg::spectral_norm_upper_bound(m);
  p.alpha = p.sigma_upper > 0.0 ? std::min(1.0, p.sigma / p.sigma_upper) : 1.0;
  return p;
}

std::vector<double> unit_vector(std::size_t n) {
  std::vector<double> e(n, 0.0);
  e[0] = 1.0;
  return e;
}

struct Recursion {
  std::vector<std::vector<double>> factors;
  std::vector<double> alphas;
  double top_sigma = 0.0;  // sigma_est of the first leading pair
};

void recurse(const DenseTensor& a, const PowerIterConfig& cfg, std::size_t level, Recursion& out) {
  const Shape& dims = a.dims();
  if (a.order() == 2) {
    const Matrix m = as_matrix(a.data(), dims[0], dims[1]);
    LeadingPair p = small_pair(m, nullptr);
    if (p.sigma == 0.0) {
      out.factors.push_back(unit_vector(dims[0]));
      out.factors.push_back(unit_vector(dims[1]));
      return;
    }
    if (p.alpha < 1.0) out.alphas.push_back(p.alpha);
    if (level == 0) out.top_sigma = p.sigma;
    out.factors.push_back(std::move(p.u));
    out.factors.push_back(std::move(p.v));
    return;
  }

  const std::size_t rows = dims[0] * dims[1];
  const std::size_t cols = a.size() / rows;
  PowerIterConfig sub = cfg;
  sub.seed = cfg.seed + 0x9e3779b97f4a7c15ULL * (level + 1);
  // Row-major storage makes the (1,2;3..2d) unfolding a plain reshape.
  auto lp = leading_pair(a.data(), rows, cols, sub);
  if (!lp) {
    for (std::size_t m = 0; m < a.order(); ++m) out.factors.push_back(unit_vector(dims[m]));
    return;
  }
  out.alphas.push_back(lp->alpha);
  if (level == 0) out.top_sigma = lp->sigma;

  const Matrix folded(dims[0], dims[1], lp->u);
  LeadingPair xp = small_pair(folded, nullptr);
  if (xp.alpha < 1.0) out.alphas.push_back(xp.alpha);

  std::vector<double> w(rows);
  for (std::size_t i = 0; i < dims[0]; ++i) {
    for (std::size_t j = 0; j < dims[1]; ++j) w[i * dims[1] + j] = xp.u[i] * xp.v[j];
  }
  Shape rest(dims.begin() + 2, dims.end());
  DenseTensor y(rest);
  kernels::gemv_t(a.data().data(), rows, cols, w.data(), y.data().data());

  out.factors.push_back(std::move(xp.u));
  out.factors.push_back(std::move(xp.v));
  recurse(y, cfg, level + 1, out);
}

}  // namespace

void validate(const PowerIterConfig& cfg) {
  if (cfg.max_iters < 1) throw std::invalid_argument("power iteration needs max_iters >= 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("power iteration tolerance must be positive");
}

std::optional<LeadingPair> leading_pair(std::span<const double> data, std::size_t rows,
                                        std::size_t cols, const PowerIterConfig& cfg) {
  validate(cfg);
  if (data.size() != rows * cols) throw std::invalid_argument("leading_pair: data size mismatch");
  if (linalg::norm2(data) == 0.0) return std::nullopt;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(cols);
  for (double& x : v) x = normal(rng);
  linalg::normalize(v);

  LeadingPair p = power_from(data, rows, cols, std::move(v), cfg.max_iters, cfg.tol);
  if (p.sigma == 0.0) {
    // Start vector orthogonal to the row space; restart from the largest row.
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double n = linalg::norm2(data.subspan(r * cols, cols));
      if (n > best_norm) {
        best_norm = n;
        best = r;
      }
    }
    std::vector<double> v0(data.begin() + best * cols, data.begin() + (best + 1) * cols);
    linalg::normalize(v0);
    p = power_from(data, rows, cols, std::move(v0), cfg.max_iters, cfg.tol);
  }
  const Matrix m = as_matrix(data, rows, cols);
  p.sigma_upper = std::max(p.sigma, linalg::spectral_norm_upper_bound(m));
  p.alpha = p.sigma_upper > 0.0 ? std::min(1.0, p.sigma / p.sigma_upper) : 0.0;
  return p;
}

std::optional<LeadingPair> leading_pair(const Matrix& m, const PowerIterConfig& cfg) {
  return leading_pair(m.data(), m.rows(), m.cols(), cfg);
}

std::optional<SpectralResult> approx_spectral_2d(const DenseTensor& a, const PowerIterConfig& cfg) {
  validate(cfg);
  if (a.order() % 2 != 0) throw std::invalid_argument("approx_spectral_2d requires even order");
  if (a.is_zero()) return std::nullopt;

  Recursion rec;
  recurse(a, cfg, 0, rec);
  for (auto& f : rec.factors) linalg::normalize(f);

  const std::size_t d = a.order() / 2;
  const double n = static_cast<double>(*std::max_element(a.dims().begin(), a.dims().end()));
  const double exponent = std::max(0.0, 1.5 * static_cast<double>(d) - 2.0);
  // prod(alpha) * sigma_upper(A_(1,2)) == sigma_est * prod(alpha beyond the top one).
  double certified = rec.top_sigma;
  for (std::size_t k = 1; k < rec.alphas.size(); ++k) certified *= rec.alphas[k];
  certified /= std::pow(n, exponent);

  RankOneAtom atom(std::move(rec.factors));
  const double value = contract_rank_one(a, atom);
  atom.set_value(value);
  return SpectralResult{std::move(atom), value, std::move(rec.alphas), certified};
}

RankOneAtom bcu_refine(const DenseTensor& a, const RankOneAtom& atom, int sweeps,
                       std::vector<double>* pair_values) {
  if (atom.dims() != a.dims()) throw std::invalid_argument("bcu_refine: atom dims mismatch");
  if (a.order() % 2 != 0) throw std::invalid_argument("bcu_refine requires even order");
  if (sweeps <= 0) return atom;

  std::vector<std::vector<double>> factors = atom.factors();
  const std::size_t d = a.order() / 2;
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t p = 2 * i;
      const std::size_t q = 2 * i + 1;
      const Matrix m = contract_except_pair(a, factors, p, q);
      // Current value x_p^T m x_q; the leading pair can only match or beat it.
      std::vector<double> mv(m.rows());
      kernels::gemv(m.data().data(), m.rows(), m.cols(), factors[q].data(), mv.data());
      const double current = kernels::dot(mv.data(), factors[p].data(), m.rows());
      LeadingPair lp = small_pair(m, &factors[q]);
      if (lp.sigma > current) {
        factors[p] = std::move(lp.u);
        factors[q] = std::move(lp.v);
        linalg::normalize(factors[p]);
        linalg::normalize(factors[q]);
      }
      if (pair_values) pair_values->push_back(contract_rank_one(a, factors));
    }
  }
  RankOneAtom out(std::move(factors));
  out.set_value(contract_rank_one(a, out));
  return out;
}

DenseTensor pad_to_even(const DenseTensor& a) {
  if (a.order() % 2 == 0) return a;
  Shape dims;
  dims.reserve(a.order() + 1);
  dims.push_back(1);
  dims.insert(dims.end(), a.dims().begin(), a.dims().end());
  return DenseTensor(std::move(dims), std::vector<double>(a.data().begin(), a.data().end()));
}

std::optional<SpectralResult> select_atom(const DenseTensor& g, const PowerIterConfig& cfg,
                                          int bcu_sweeps) {
  if (g.is_zero()) return std::nullopt;
  const DenseTensor padded = pad_to_even(g);
  auto res = approx_spectral_2d(padded, cfg);
  if (!res) return std::nullopt;
  RankOneAtom refined = bcu_refine(padded, res->atom, bcu_sweeps);

  std::vector<std::vector<double>> factors = refined.factors();
  if (padded.order() != g.order()) {
    // The singleton factor is +-1; push its sign into the next factor.
    const double sign = factors.front()[0] < 0.0 ? -1.0 : 1.0;
    factors.erase(factors.begin());
    for (double& x : factors.front()) x *= sign;
  }
  RankOneAtom atom(std::move(factors));
  const double value = contract_rank_one(g, atom);
  atom.set_value(value);
  return SpectralResult{std::move(atom), value, std::move(res->alphas), res->certified_lower_bound};
}

double unfold12_spectral_norm(const DenseTensor& g) {
  if (g.order() == 1) return g.frobenius_norm();
  const std::size_t rows = g.order() == 2 ? g.dims()[0] : g.dims()[0] * g.dims()[1];
  const std::size_t cols = g.size() / rows;
  return linalg::largest_singular_value(as_matrix(g.data(), rows, cols));
}

}  // namespace homp
