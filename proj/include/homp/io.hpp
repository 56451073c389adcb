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

// Text formats. All indices are 1-based on disk; numbers are written with
// 17 significant digits so a write/read cycle is exact.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "homp/completion.hpp"
#include "homp/mlmtl.hpp"

namespace homp::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input with nothing to fit, e.g. no observations.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense: "N" / "n_1 ... n_N" / values, last index fastest.
DenseTensor read_dense(std::istream& is, const std::string& source = "<stream>");
void write_dense(std::ostream& os, const DenseTensor& t);

// Kruskal: "N R" / dims / per term a weight line and N factor lines.
KruskalModel read_kruskal(std::istream& is, const std::string& source = "<stream>");
void write_kruskal(std::ostream& os, const KruskalModel& m);

// Observations: "N" / dims / "i_1 ... i_N value" lines.
SparseObservations read_observations(std::istream& is, const std::string& source = "<stream>");
void write_observations(std::ostream& os, const SparseObservations& obs);

// MLMTL: "D N" / task_dims / "i_1 ... i_N y x_1 ... x_D" lines.
TaskSet read_tasks(std::istream& is, const std::string& source = "<stream>");
void write_tasks(std::ostream& os, const TaskSet& tasks);

DenseTensor load_dense(const std::filesystem::path& p);
KruskalModel load_kruskal(const std::filesystem::path& p);
SparseObservations load_observations(const std::filesystem::path& p);
TaskSet load_tasks(const std::filesystem::path& p);

void save_dense(const std::filesystem::path& p, const DenseTensor& t);
void save_kruskal(const std::filesystem::path& p, const KruskalModel& m);
void save_observations(const std::filesystem::path& p, const SparseObservations& obs);
void save_tasks(const std::filesystem::path& p, const TaskSet& tasks);

}  // namespace homp::io
