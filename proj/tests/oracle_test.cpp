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

#include "homp/completion.hpp"
#include "homp/generators.hpp"
#include "homp/oracle.hpp"
#include "test_util.hpp"

namespace {

using namespace homp;

TEST(Oracle, RankOneTensorNormIsItsWeight) {
  const RankOneAtom s = homp::testing::random_atom({4, 3, 5}, 1);
  DenseTensor a = atom_to_dense(s);
  for (double& x : a.data()) x *= 3.5;
  const auto r = oracle::spectral_norm_bruteforce(a);
  EXPECT_NEAR(r.value, 3.5, 1e-10);
}

TEST(Oracle, MatrixCaseMatchesSvd) {
  const Matrix m = homp::testing::random_matrix(7, 5, 2);
  const auto svd = oracle::svd_small(m);
  const DenseTensor t(Shape{7, 5}, std::vector<double>(m.data().begin(), m.data().end()));
  EXPECT_NEAR(oracle::spectral_norm_bruteforce(t).value, svd.s[0], 1e-9);
  for (std::size_t i = 1; i < svd.s.size(); ++i) EXPECT_GE(svd.s[i - 1], svd.s[i]);
}

TEST(Oracle, SvdReconstructs) {
  const Matrix m = homp::testing::random_matrix(6, 9, 3);
  const auto svd = oracle::svd_small(m);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 9; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < svd.s.size(); ++k) acc += svd.u(r, k) * svd.s[k] * svd.v(c, k);
      EXPECT_NEAR(acc, m(r, c), 1e-12);
    }
  EXPECT_THROW(oracle::svd_small(Matrix(65, 65)), std::invalid_argument);
}

TEST(Oracle, BruteForceDominatesRandomAtomsAndRejectsLarge) {
  const DenseTensor a = homp::testing::random_tensor({4, 4, 4}, 4);
  const auto r = oracle::spectral_norm_bruteforce(a);
  EXPECT_NEAR(inner(a, atom_to_dense(r.atom)), r.value, 1e-10);
  for (std::uint64_t s = 0; s < 200; ++s)
    EXPECT_LE(std::abs(inner(a, atom_to_dense(homp::testing::random_atom({4, 4, 4}, 100 + s)))), r.value + 1e-12);
  EXPECT_LE(r.value, a.frobenius_norm() + 1e-12);
  EXPECT_THROW(oracle::spectral_norm_bruteforce(DenseTensor(Shape{30, 30, 30})), std::invalid_argument);
}

TEST(Oracle, GridLineSearchFindsQuadraticMinimum) {
  CompletionConfig c;
  c.dims = {4, 4, 4};
  c.cp_rank = 1;
  c.missing_ratio = 0.0;
  c.seed = 5;
  const auto inst = gen_completion(c);
  CompletionObjective obj(inst.obs, LossFunction::least_squares());
  const auto& term = inst.truth.terms()[0];
  const auto g = oracle::grid_line_search(obj, KruskalModel(c.dims), term.atom, 0.0, 2.0 * term.weight, 201);
  EXPECT_NEAR(g.alpha, term.weight, 1e-12 + 2.0 * term.weight / 200.0);
  EXPECT_LE(g.value, 1e-20);
}

TEST(Oracle, DirectionalDifferenceOfQuadratic) {
  const DenseTensor x = homp::testing::random_tensor({3, 4}, 6), d = homp::testing::random_tensor({3, 4}, 7);
  const auto f = [](const DenseTensor& w) { return 0.5 * inner(w, w); };
  EXPECT_NEAR(oracle::directional_fd(f, x, d), inner(x, d), 1e-8);
}

}  // namespace
