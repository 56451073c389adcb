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

// Dense tensors, rank-one atoms and Kruskal (weighted sum of atoms) models.
//
// Storage is lexicographic with the last index varying fastest. All indices
// in this API are 0-based; the text formats in io.hpp are 1-based.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace homp {

using Shape = std::vector<std::size_t>;

// Product of the extents. Empty shape has volume 1.
std::size_t volume(std::span<const std::size_t> dims);

// Throws std::invalid_argument unless dims is nonempty with every extent >= 1.
void check_shape(std::span<const std::size_t> dims);

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix transposed() const;
  double frobenius_norm() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class DenseTensor {
 public:
  // Zero tensor of the given shape.
  explicit DenseTensor(Shape dims);
  DenseTensor(Shape dims, std::vector<double> data);

  const Shape& dims() const { return dims_; }
  std::size_t order() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  std::size_t offset(std::span<const std::size_t> index) const;
  double operator[](std::span<const std::size_t> index) const { return data_[offset(index)]; }
  double& operator[](std::span<const std::size_t> index) { return data_[offset(index)]; }
  double at(std::initializer_list<std::size_t> index) const;

  double frobenius_norm() const;
  bool is_zero() const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Shape dims_;
  std::vector<double> data_;
};

// x_1 (x) ... (x) x_N with unit-norm factors, plus the contraction value it
// was extracted with (0 when not meaningful).
class RankOneAtom {
 public:
  static constexpr double kUnitTolerance = 1e-10;

  // Throws std::invalid_argument if any factor is empty or not unit norm.
  explicit RankOneAtom(std::vector<std::vector<double>> factors, double value = 0.0);

  // Normalizes each factor; returns the atom and the product of the original
  // norms. Throws if a factor is zero.
  static std::pair<RankOneAtom, double> from_unnormalized(std::vector<std::vector<double>> factors);

  std::size_t order() const { return factors_.size(); }
  Shape dims() const;
  const std::vector<double>& factor(std::size_t mode) const { return factors_[mode]; }
  const std::vector<std::vector<double>>& factors() const { return factors_; }
  double value() const { return value_; }
  void set_value(double v) { value_ = v; }

 private:
  std::vector<std::vector<double>> factors_;
  double value_ = 0.0;
};

struct KruskalTerm {
  double weight;
  RankOneAtom atom;
};

class KruskalModel {
 public:
  explicit KruskalModel(Shape dims);

  const Shape& dims() const { return dims_; }
  std::size_t rank() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<KruskalTerm>& terms() const { return terms_; }

  // Throws std::invalid_argument on a dimension mismatch.
  void append(double weight, RankOneAtom atom);
  void set_weight(std::size_t i, double w) { terms_.at(i).weight = w; }
  void scale_weights(double factor);
  std::vector<double> weights() const;

  // Number of stored scalars: sum(dims) * rank + rank.
  std::size_t storage_size() const;

 private:
  Shape dims_;
  std::vector<KruskalTerm> terms_;
};

double inner(const DenseTensor& a, const DenseTensor& b);

// Mode-d unfolding: row i holds every entry whose d-th index is i; columns
// run lexicographically over the remaining modes.
Matrix unfold_mode(const DenseTensor& a, std::size_t mode);
DenseTensor fold_mode(const Matrix& m, std::size_t mode, const Shape& dims);

// General unfolding. Row index merges row_modes left to right
// ((i_p1 * n_p2 + i_p2) * n_p3 + ...); columns likewise over col_modes.
// row_modes and col_modes must be nonempty and together a permutation of
// the modes.
Matrix unfold(const DenseTensor& a, std::span<const std::size_t> row_modes,
              std::span<const std::size_t> col_modes);
DenseTensor fold(const Matrix& m, std::span<const std::size_t> row_modes,
                 std::span<const std::size_t> col_modes, const Shape& dims);

// a x_d u with u of shape J x n_d. The result replaces n_d by J.
DenseTensor mode_multiply(const DenseTensor& a, std::size_t mode, const Matrix& u);

// a x_d x^T: contracts mode d with a vector and drops the mode. An order-1
// input yields a shape {1} tensor holding the scalar.
DenseTensor contract_mode(const DenseTensor& a, std::size_t mode, std::span<const double> x);

// Contracts every mode except p < q with the matching factors; the result is
// the n_p x n_q matrix. factors[p] and factors[q] are ignored.
Matrix contract_except_pair(const DenseTensor& a, const std::vector<std::vector<double>>& factors,
                            std::size_t p, std::size_t q);

DenseTensor atom_to_dense(const RankOneAtom& atom);
DenseTensor kruskal_to_dense(const KruskalModel& model);

// <a, x_1 (x) ... (x) x_N> by successive contractions, without materializing
// the atom.
double contract_rank_one(const DenseTensor& a, const RankOneAtom& atom);
double contract_rank_one(const DenseTensor& a, const std::vector<std::vector<double>>& factors);

}  // namespace homp
