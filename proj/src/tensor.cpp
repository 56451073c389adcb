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

#include "homp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "homp/kernels.hpp"

namespace homp {
namespace {

void check_mode(std::size_t mode, std::size_t order) {
  if (mode >= order) {
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range for order " +
                            std::to_string(order));
  }
}

double norm2(std::span<const double> x) {
  return std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
}

// Per-mode coefficient of the merged row/column index, plus a flag saying
// which side the mode lands on.
struct UnfoldMap {
  std::vector<std::size_t> coef;
  std::vector<bool> is_row;
  std::size_t rows = 1;
  std::size_t cols = 1;
};

UnfoldMap make_unfold_map(const Shape& dims, std::span<const std::size_t> row_modes,
                          std::span<const std::size_t> col_modes) {
  const std::size_t n = dims.size();
  if (row_modes.empty() || col_modes.empty()) {
    throw std::invalid_argument("unfold: row and column mode lists must be nonempty");
  }
  if (row_modes.size() + col_modes.size() != n) {
    throw std::invalid_argument("unfold: mode lists must cover every mode exactly once");
  }
  UnfoldMap map;
  map.coef.assign(n, 0);
  map.is_row.assign(n, false);
  std::vector<bool> seen(n, false);
  auto assign = [&](std::span<const std::size_t> modes, bool row, std::size_t& extent) {
    std::size_t c = 1;
    for (auto it = modes.rbegin(); it != modes.rend(); ++it) {
      const std::size_t m = *it;
      if (m >= n || seen[m]) throw std::invalid_argument("unfold: overlapping or invalid mode list");
      seen[m] = true;
      map.coef[m] = c;
      map.is_row[m] = row;
      c *= dims[m];
    }
    extent = c;
  };
  assign(row_modes, true, map.rows);
  assign(col_modes, false, map.cols);
  return map;
}

// Visits every multi-index in storage order with its (row, col) position.
template <typename F>
void for_each_unfolded(const Shape& dims, const UnfoldMap& map, F&& f) {
  const std::size_t n = dims.size();
  const std::size_t total = volume(dims);
  std::vector<std::size_t> idx(n, 0);
  std::size_t row = 0;
  std::size_t col = 0;
  for (std::size_t lin = 0; lin < total; ++lin) {
    f(lin, row, col);
    for (std::size_t m = n; m-- > 0;) {
      std::size_t& pos = map.is_row[m] ? row : col;
      if (++idx[m] < dims[m]) {
        pos += map.coef[m];
        break;
      }
      pos -= map.coef[m] * (dims[m] - 1);
      idx[m] = 0;
    }
  }
}

std::vector<std::size_t> other_modes(std::size_t order, std::size_t mode) {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < order; ++m) {
    if (m != mode) out.push_back(m);
  }
  return out;
}

}  // namespace

std::size_t volume(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_shape(std::span<const std::size_t> dims) {
  if (dims.empty()) throw std::invalid_argument("tensor order must be at least 1");
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("tensor extents must be positive");
  }
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw std::invalid_argument("matrix data size mismatch");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

double Matrix::frobenius_norm() const { return norm2(data_); }

// ---------------------------------------------------------------------------
// DenseTensor

DenseTensor::DenseTensor(Shape dims) : dims_(std::move(dims)) {
  check_shape(dims_);
  data_.assign(volume(dims_), 0.0);
}

DenseTensor::DenseTensor(Shape dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  check_shape(dims_);
  if (data_.size() != volume(dims_)) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                " does not match shape volume " + std::to_string(volume(dims_)));
  }
}

std::size_t DenseTensor::offset(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw std::invalid_argument("index order mismatch");
  std::size_t off = 0;
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (index[m] >= dims_[m]) throw std::out_of_range("tensor index out of range");
    off = off * dims_[m] + index[m];
  }
  return off;
}

double DenseTensor::at(std::initializer_list<std::size_t> index) const {
  return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
}

double DenseTensor::frobenius_norm() const { return norm2(data_); }

bool DenseTensor::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

// ---------------------------------------------------------------------------
// RankOneAtom / KruskalModel

RankOneAtom::RankOneAtom(std::vector<std::vector<double>> factors, double value)
    : factors_(std::move(factors)), value_(value) {
  if (factors_.empty()) throw std::invalid_argument("atom needs at least one factor");
  for (const auto& f : factors_) {
    if (f.empty()) throw std::invalid_argument("atom factor must be nonempty");
    if (std::abs(norm2(f) - 1.0) > kUnitTolerance) {
      throw std::invalid_argument("atom factors must have unit norm");
    }
  }
}

std::pair<RankOneAtom, double> RankOneAtom::from_unnormalized(
    std::vector<std::vector<double>> factors) {
  double scale = 1.0;
  for (auto& f : factors) {
    const double nrm = norm2(f);
    if (!(nrm > 0.0)) throw std::invalid_argument("cannot normalize a zero factor");
    for (double& v : f) v /= nrm;
    scale *= nrm;
  }
  return {RankOneAtom(std::move(factors)), scale};
}

Shape RankOneAtom::dims() const {
  Shape d;
  d.reserve(factors_.size());
  for (const auto& f : factors_) d.push_back(f.size());
  return d;
}

KruskalModel::KruskalModel(Shape dims) : dims_(std::move(dims)) { check_shape(dims_); }

void KruskalModel::append(double weight, RankOneAtom atom) {
  if (atom.dims() != dims_) throw std::invalid_argument("atom dims do not match model dims");
  terms_.push_back({weight, std::move(atom)});
}

void KruskalModel::scale_weights(double factor) {
  for (auto& t : terms_) t.weight *= factor;
}

std::vector<double> KruskalModel::weights() const {
  std::vector<double> w;
  w.reserve(terms_.size());
  for (const auto& t : terms_) w.push_back(t.weight);
  return w;
}

std::size_t KruskalModel::storage_size() const {
  return rank() * (std::accumulate(dims_.begin(), dims_.end(), std::size_t{0}) + 1);
}

// ---------------------------------------------------------------------------
// Operations

double inner(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("inner: dimension mismatch");
  return kernels::dot(a.data().data(), b.data().data(), a.size());
}

Matrix unfold(const DenseTensor& a, std::span<const std::size_t> row_modes,
              std::span<const std::size_t> col_modes) {
  const UnfoldMap map = make_unfold_map(a.dims(), row_modes, col_modes);
  Matrix m(map.rows, map.cols);
  const auto src = a.data();
  auto dst = m.data();
  for_each_unfolded(a.dims(), map, [&](std::size_t lin, std::size_t r, std::size_t c) {
    dst[r * map.cols + c] = src[lin];
  });
  return m;
}

DenseTensor fold(const Matrix& m, std::span<const std::size_t> row_modes,
                 std::span<const std::size_t> col_modes, const Shape& dims) {
  check_shape(dims);
  const UnfoldMap map = make_unfold_map(dims, row_modes, col_modes);
  if (m.rows() != map.rows || m.cols() != map.cols) {
    throw std::invalid_argument("fold: matrix shape does not match tensor dims");
  }
  DenseTensor a(dims);
  auto dst = a.data();
  const auto src = m.data();
  for_each_unfolded(dims, map, [&](std::size_t lin, std::size_t r, std::size_t c) {
    dst[lin] = src[r * map.cols + c];
  });
  return a;
}

Matrix unfold_mode(const DenseTensor& a, std::size_t mode) {
  check_mode(mode, a.order());
  const std::size_t rows[] = {mode};
  if (a.order() == 1) return Matrix(a.size(), 1, {a.data().begin(), a.data().end()});
  const auto cols = other_modes(a.order(), mode);
  return unfold(a, rows, cols);
}

DenseTensor fold_mode(const Matrix& m, std::size_t mode, const Shape& dims) {
  check_shape(dims);
  check_mode(mode, dims.size());
  if (dims.size() == 1) {
    if (m.rows() != dims[0] || m.cols() != 1) throw std::invalid_argument("fold: shape mismatch");
    return DenseTensor(dims, {m.data().begin(), m.data().end()});
  }
  const std::size_t rows[] = {mode};
  const auto cols = other_modes(dims.size(), mode);
  return fold(m, rows, cols, dims);
}

DenseTensor mode_multiply(const DenseTensor& a, std::size_t mode, const Matrix& u) {
  check_mode(mode, a.order());
  const Shape& dims = a.dims();
  if (u.cols() != dims[mode]) throw std::invalid_argument("mode_multiply: inner dimension mismatch");
  const std::size_t outer = volume(std::span(dims).first(mode));
  const std::size_t inner_sz = volume(std::span(dims).subspan(mode + 1));
  const std::size_t n = dims[mode];
  const std::size_t j_out = u.rows();
  Shape out_dims = dims;
  out_dims[mode] = j_out;
  DenseTensor out(out_dims);
  const double* src = a.data().data();
  double* dst = out.data().data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t j = 0; j < j_out; ++j) {
      double* y = dst + (o * j_out + j) * inner_sz;
      for (std::size_t k = 0; k < n; ++k) {
        const double c = u(j, k);
        if (c != 0.0) kernels::axpy(c, src + (o * n + k) * inner_sz, y, inner_sz);
      }
    }
  }
  return out;
}

DenseTensor contract_mode(const DenseTensor& a, std::size_t mode, std::span<const double> x) {
  check_mode(mode, a.order());
  const Shape& dims = a.dims();
  if (x.size() != dims[mode]) throw std::invalid_argument("contract_mode: vector length mismatch");
  const std::size_t outer = volume(std::span(dims).first(mode));
  const std::size_t inner_sz = volume(std::span(dims).subspan(mode + 1));
  const std::size_t n = dims[mode];
  Shape out_dims;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    if (m != mode) out_dims.push_back(dims[m]);
  }
  if (out_dims.empty()) out_dims.push_back(1);
  DenseTensor out(out_dims);
  const double* src = a.data().data();
  double* dst = out.data().data();
  if (inner_sz == 1) {
    kernels::gemv(src, outer, n, x.data(), dst);
  } else {
    for (std::size_t o = 0; o < outer; ++o) {
      kernels::gemv_t(src + o * n * inner_sz, n, inner_sz, x.data(), dst + o * inner_sz);
    }
  }
  return out;
}

Matrix contract_except_pair(const DenseTensor& a, const std::vector<std::vector<double>>& factors,
                            std::size_t p, std::size_t q) {
  if (!(p < q) || q >= a.order()) throw std::invalid_argument("contract_except_pair: need p < q < order");
  if (factors.size() != a.order()) throw std::invalid_argument("contract_except_pair: factor count mismatch");
  DenseTensor cur = a;
  // Descending order keeps the index of every not-yet-contracted mode stable.
  for (std::size_t m = a.order(); m-- > 0;) {
    if (m == p || m == q) continue;
    cur = contract_mode(cur, m, factors[m]);
  }
  return Matrix(a.dims()[p], a.dims()[q], std::vector<double>(cur.data().begin(), cur.data().end()));
}

DenseTensor atom_to_dense(const RankOneAtom& atom) {
  const Shape dims = atom.dims();
  DenseTensor out(dims);
  auto data = out.data();
  // Build the outer product one mode at a time: block of size `filled`
  // expands to filled * n_m.
  data[0] = 1.0;
  std::size_t filled = 1;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    const auto& f = atom.factor(m);
    const std::size_t n = f.size();
    for (std::size_t b = filled; b-- > 0;) {
      const double v = data[b];
      for (std::size_t k = 0; k < n; ++k) data[b * n + k] = v * f[k];
    }
    filled *= n;
  }
  return out;
}

DenseTensor kruskal_to_dense(const KruskalModel& model) {
  DenseTensor out(model.dims());
  for (const auto& t : model.terms()) {
    const DenseTensor d = atom_to_dense(t.atom);
    kernels::axpy(t.weight, d.data().data(), out.data().data(), out.size());
  }
  return out;
}

double contract_rank_one(const DenseTensor& a, const std::vector<std::vector<double>>& factors) {
  if (factors.size() != a.order()) throw std::invalid_argument("contract_rank_one: order mismatch");
  for (std::size_t m = 0; m < factors.size(); ++m) {
    if (factors[m].size() != a.dims()[m]) throw std::invalid_argument("contract_rank_one: dims mismatch");
  }
  if (a.order() == 1) return kernels::dot(a.data().data(), factors[0].data(), a.size());
  DenseTensor cur = contract_mode(a, a.order() - 1, factors.back());
  for (std::size_t m = a.order() - 1; m-- > 1;) cur = contract_mode(cur, m, factors[m]);
  return kernels::dot(cur.data().data(), factors[0].data(), cur.size());
}

double contract_rank_one(const DenseTensor& a, const RankOneAtom& atom) {
  return contract_rank_one(a, atom.factors());
}

}  // namespace homp
