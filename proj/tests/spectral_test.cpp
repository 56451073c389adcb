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

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "homp/linalg.hpp"
#include "homp/oracle.hpp"
#include "homp/spectral.hpp"
#include "test_util.hpp"

namespace {

using namespace homp;
using homp::testing::random_atom;
using homp::testing::random_tensor;

double factor_match(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return std::abs(s);
}

TEST(LeadingPair, DiagonalConvergesAndAlphaApproachesOne) {
  Matrix d(2, 2, {3, 0, 0, 1});
  PowerIterConfig cfg;
  cfg.max_iters = 200;
  cfg.tol = 1e-15;
  const auto p = leading_pair(d, cfg);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->sigma, 3.0, 1e-12);
  EXPECT_NEAR(std::abs(p->u[0]), 1.0, 1e-12);
  EXPECT_NEAR(p->alpha, 1.0, 1e-10);
}

TEST(LeadingPair, RankOneConvergesImmediately) {
  std::mt19937_64 rng(1);
  const auto a = homp::testing::random_vector(5, rng), b = homp::testing::random_vector(4, rng);
  Matrix m(5, 4);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = a[i] * b[j];
  const auto p = leading_pair(m, PowerIterConfig{});
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->sigma, linalg::norm2(a) * linalg::norm2(b), 1e-12);
  EXPECT_LE(p->iterations, 2);
  EXPECT_NEAR(p->alpha, 1.0, 1e-12);
}

TEST(LeadingPair, RandomMatchesOracleAndZeroIsDegenerate) {
  const Matrix m = homp::testing::random_matrix(6, 8, 3);
  PowerIterConfig cfg;
  cfg.max_iters = 500;
  cfg.tol = 1e-16;
  const auto p = leading_pair(m, cfg);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->sigma, oracle::svd_small(m).s[0], 1e-8);
  EXPECT_GT(p->alpha, 0.0);
  EXPECT_LE(p->alpha, 1.0);
  EXPECT_FALSE(leading_pair(Matrix(3, 3), cfg));
}

TEST(PowerIterConfig, Validation) {
  PowerIterConfig bad;
  bad.tol = 0.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = PowerIterConfig{};
  bad.max_iters = 0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(ApproxSpectral2d, MatrixIsExact) {
  const DenseTensor a = random_tensor({5, 7}, 4);
  const auto r = approx_spectral_2d(a, PowerIterConfig{});
  ASSERT_TRUE(r);
  const double s1 = oracle::svd_small(Matrix(5, 7, std::vector<double>(a.data().begin(), a.data().end()))).s[0];
  EXPECT_NEAR(r->value, s1, 1e-12);
}

TEST(ApproxSpectral2d, UnitRankOneRecovered) {
  for (const Shape& dims : {Shape{3, 4}, Shape{3, 4, 2, 5}, Shape{2, 3, 2, 2, 3, 2}}) {
    const RankOneAtom s = random_atom(dims, dims.size());
    const auto r = approx_spectral_2d(atom_to_dense(s), PowerIterConfig{});
    ASSERT_TRUE(r);
    EXPECT_NEAR(r->value, 1.0, 1e-10);
    for (std::size_t m = 0; m < dims.size(); ++m) EXPECT_NEAR(factor_match(r->atom.factor(m), s.factor(m)), 1.0, 1e-8);
  }
}

TEST(ApproxSpectral2d, ErrorsAndDegenerate) {
  EXPECT_THROW(approx_spectral_2d(random_tensor({2, 2, 2}, 0), PowerIterConfig{}), std::invalid_argument);
  EXPECT_FALSE(approx_spectral_2d(DenseTensor(Shape{2, 2, 2, 2}), PowerIterConfig{}));
}

TEST(ApproxSpectral2d, ResultInvariantsAndOracleRatio) {
  oracle::OracleConfig oc;
  for (int seed = 0; seed < 20; ++seed) {
    const DenseTensor a = random_tensor({4, 4, 4, 4}, 1000 + seed);
    PowerIterConfig cfg;
    cfg.seed = seed;
    const auto r = approx_spectral_2d(a, cfg);
    ASSERT_TRUE(r);
    EXPECT_LE(homp::testing::rel_diff(r->value, contract_rank_one(a, r->atom)), 1e-10);
    EXPECT_GE(r->value, r->certified_lower_bound - 1e-10);
    double prod = 1.0;
    for (double al : r->alphas) {
      EXPECT_GT(al, 0.0);
      EXPECT_LE(al, 1.0);
      prod *= al;
    }
    oc.seed = seed;
    const double opt = oracle::spectral_norm_bruteforce(a, oc).value;
    EXPECT_GE(r->value, prod / 4.0 * opt);
  }
}

TEST(ApproxSpectral2d, CertifiedBoundOnOrdersFourAndSix) {
  int checked = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const Shape dims = seed % 2 == 0 ? Shape{4, 3, 4, 2} : Shape{2, 3, 2, 2, 3, 2};
    const DenseTensor a = random_tensor(dims, 5000 + seed);
    PowerIterConfig cfg;
    cfg.seed = seed;
    const auto r = approx_spectral_2d(a, cfg);
    ASSERT_TRUE(r);
    const std::size_t d = dims.size() / 2;
    const double n = 4.0 * (seed % 2 == 0) + 3.0 * (seed % 2 == 1);
    const Matrix a12(dims[0] * dims[1], a.size() / (dims[0] * dims[1]),
                     std::vector<double>(a.data().begin(), a.data().end()));
    const double s12 = oracle::svd_small(a12).s[0];
    double prod = 1.0;
    for (double al : r->alphas) prod *= al;
    const double expo = std::max(0.0, 1.5 * static_cast<double>(d) - 2.0);
    EXPECT_GE(r->value, prod * s12 / std::pow(n, expo) - 1e-9);
    // The (1,2) unfolding norm dominates the tensor norm.
    EXPECT_GE(s12 * (1 + 1e-12), oracle::spectral_norm_bruteforce(a, oracle::OracleConfig{10, 1e-12, 2000, 0}).value);
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(BcuRefine, MonotoneFixedPointAndNoop) {
  for (int seed = 0; seed < 50; ++seed) {
    const DenseTensor a = random_tensor({4, 4, 4, 4}, 77 + seed);
    const auto start = approx_spectral_2d(a, PowerIterConfig{});
    ASSERT_TRUE(start);
    std::vector<double> values{contract_rank_one(a, start->atom)};
    bcu_refine(a, start->atom, 2, &values);
    ASSERT_EQ(values.size(), 5u);
    for (std::size_t i = 1; i < values.size(); ++i) ASSERT_GE(values[i], values[i - 1] - 1e-12);
  }
  const RankOneAtom s = random_atom({3, 2, 4, 3}, 8);
  const RankOneAtom same = bcu_refine(atom_to_dense(s), s, 3);
  EXPECT_NEAR(same.value(), 1.0, 1e-12);
  const DenseTensor a = random_tensor({3, 2, 4, 3}, 9);
  const RankOneAtom untouched = bcu_refine(a, s, 0);
  EXPECT_EQ(untouched.factors(), s.factors());
}

TEST(PadToEven, ShapesAndOracleValue) {
  const DenseTensor a = random_tensor({3, 3, 3}, 10);
  const DenseTensor p = pad_to_even(a);
  EXPECT_EQ(p.dims(), (Shape{1, 3, 3, 3}));
  const DenseTensor b = random_tensor({2, 2, 2, 2}, 11);
  EXPECT_EQ(pad_to_even(b), b);
  const double va = oracle::spectral_norm_bruteforce(a).value;
  const double vp = oracle::spectral_norm_bruteforce(p).value;
  EXPECT_NEAR(va, vp, 1e-10);
}

TEST(SelectAtom, RankOneMatrixAndThreeWay) {
  const RankOneAtom s = random_atom({3, 4, 5}, 12);
  DenseTensor g = atom_to_dense(s);
  for (double& x : g.data()) x *= 2.5;
  const auto r = select_atom(g, PowerIterConfig{});
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->value, 2.5, 1e-10);
  EXPECT_EQ(r->atom.dims(), g.dims());

  const DenseTensor m = random_tensor({6, 9}, 13);
  const auto rm = select_atom(m, PowerIterConfig{});
  ASSERT_TRUE(rm);
  EXPECT_GE(rm->value, (1 - 1e-8) * oracle::svd_small(unfold_mode(m, 0)).s[0]);

  for (int seed = 0; seed < 20; ++seed) {
    const DenseTensor t = random_tensor({3, 3, 3}, 200 + seed);
    const auto rt = select_atom(t, PowerIterConfig{});
    ASSERT_TRUE(rt);
    EXPECT_NEAR(rt->value, contract_rank_one(t, rt->atom), 1e-12);
    EXPECT_GE(rt->value, rt->certified_lower_bound - 1e-10);
  }
  EXPECT_FALSE(select_atom(DenseTensor(Shape{2, 3}), PowerIterConfig{}));
}

TEST(SelectAtom, Deterministic) {
  const DenseTensor t = random_tensor({5, 4, 6}, 14);
  PowerIterConfig cfg;
  cfg.seed = 99;
  const auto a = select_atom(t, cfg), b = select_atom(t, cfg);
  EXPECT_EQ(a->atom.factors(), b->atom.factors());
  EXPECT_EQ(a->value, b->value);
  EXPECT_EQ(a->alphas, b->alphas);
}

TEST(Unfold12, MatchesOracle) {
  const DenseTensor t = random_tensor({3, 4, 5}, 15);
  const Matrix m(12, 5, std::vector<double>(t.data().begin(), t.data().end()));
  EXPECT_NEAR(unfold12_spectral_norm(t), oracle::svd_small(m).s[0], 1e-12);
}

}  // namespace
