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
#include <filesystem>
#include <sstream>

#include "homp/generators.hpp"
#include "homp/io.hpp"
#include "test_util.hpp"

namespace {

using namespace homp;

TEST(Io, DenseRoundTripIsBitExact) {
  const DenseTensor t = homp::testing::random_tensor({2, 3, 4}, 1);
  std::stringstream ss;
  io::write_dense(ss, t);
  EXPECT_EQ(io::read_dense(ss), t);
}

TEST(Io, DenseLayoutLastIndexFastest) {
  std::istringstream in("2\n2 3\n\n1 2 3\n4 5 6\n");
  const DenseTensor t = io::read_dense(in);
  EXPECT_EQ(t.at({1, 0}), 4.0);
  EXPECT_EQ(t.at({0, 2}), 3.0);
}

TEST(Io, KruskalRoundTrip) {
  const KruskalModel m = random_kruskal({3, 4, 2}, 3, 2);
  std::stringstream ss;
  io::write_kruskal(ss, m);
  const KruskalModel r = io::read_kruskal(ss);
  ASSERT_EQ(r.rank(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.weights()[i], m.weights()[i], 1e-14 * std::abs(m.weights()[i]));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t d = 0; d < 3; ++d)
      for (std::size_t j = 0; j < m.dims()[d]; ++j)
        EXPECT_NEAR(r.terms()[i].atom.factor(d)[j], m.terms()[i].atom.factor(d)[j], 1e-15);
}

TEST(Io, KruskalRenormalizesFactors) {
  std::istringstream in("2 1\n2 2\n1.5\n3 4\n0 2\n");
  const KruskalModel m = io::read_kruskal(in);
  EXPECT_DOUBLE_EQ(m.weights()[0], 1.5 * 5.0 * 2.0);
  EXPECT_DOUBLE_EQ(m.terms()[0].atom.factor(0)[0], 0.6);
}

TEST(Io, ObservationsUseOneBasedIndices) {
  std::istringstream in("3\n2 2 2\n1 1 1 0.5\n2 2 2 -1\n");
  const SparseObservations obs = io::read_observations(in);
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs.index(1, 0), 1u);
  EXPECT_EQ(obs.values()[1], -1.0);
  std::stringstream out;
  io::write_observations(out, obs);
  const SparseObservations back = io::read_observations(out);
  EXPECT_EQ(std::vector<double>(back.values().begin(), back.values().end()),
            std::vector<double>(obs.values().begin(), obs.values().end()));
}

TEST(Io, ObservationErrorsCarryLineNumbers) {
  std::istringstream bad("3\n2 2 2\n1 1 1 0.5\n1 3 1 2\n");
  try {
    io::read_observations(bad, "obs.txt");
    FAIL() << "expected ParseError";
  } catch (const io::ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("obs.txt"), std::string::npos);
  }
  std::istringstream garbage("3\n2 2 x\n");
  EXPECT_THROW(io::read_observations(garbage), io::ParseError);
  std::istringstream empty("3\n2 2 2\n");
  EXPECT_THROW(io::read_observations(empty), io::DegenerateInputError);
  std::istringstream zero("1\n0\n");
  EXPECT_THROW(io::read_observations(zero), io::ParseError);
}

TEST(Io, TasksRoundTrip) {
  const TaskSet ts = gen_mlmtl(4, {2, 2}, 2, 5, 0.1, 3);
  std::stringstream ss;
  io::write_tasks(ss, ts);
  const TaskSet r = io::read_tasks(ss);
  EXPECT_EQ(r.feature_dim(), 4u);
  EXPECT_EQ(r.task_dims(), ts.task_dims());
  for (std::size_t t = 0; t < ts.num_tasks(); ++t) {
    EXPECT_EQ(r.task(t).y, ts.task(t).y);
    EXPECT_EQ(r.task(t).x, ts.task(t).x);
  }
}

TEST(Io, FilesAndMissingPaths) {
  const auto dir = std::filesystem::temp_directory_path() / "homp_io_test";
  std::filesystem::create_directories(dir);
  const DenseTensor t = homp::testing::random_tensor({3, 3}, 4);
  io::save_dense(dir / "t.txt", t);
  EXPECT_EQ(io::load_dense(dir / "t.txt"), t);
  EXPECT_THROW(io::load_dense(dir / "missing.txt"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

}  // namespace
