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

#include "homp/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace homp::io {
namespace {

// Line-oriented reader that skips blank lines and remembers line numbers.
class LineReader {
 public:
  LineReader(std::istream& is, std::string source) : is_(is), source_(std::move(source)) {}

  bool next(std::vector<std::string_view>& tokens) {
    tokens.clear();
    while (std::getline(is_, line_)) {
      ++line_no_;
      split(line_, tokens);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::vector<std::string_view> require(const char* what) {
    std::vector<std::string_view> tokens;
    if (!next(tokens)) fail(std::string("unexpected end of file, expected ") + what);
    return tokens;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

  double number(std::string_view tok) const {
    double v = 0.0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) fail("bad number '" + std::string(tok) + "'");
    return v;
  }

  std::size_t count(std::string_view tok) const {
    std::size_t v = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) fail("bad integer '" + std::string(tok) + "'");
    return v;
  }

  std::size_t index(std::string_view tok, std::size_t dim) const {
    const std::size_t i = count(tok);
    if (i < 1 || i > dim) fail("index " + std::string(tok) + " outside 1.." + std::to_string(dim));
    return i - 1;
  }

  Shape dims(std::size_t order) {
    const auto tok = require("dimension line");
    if (tok.size() != order) fail("expected " + std::to_string(order) + " dimensions");
    Shape d;
    for (auto t : tok) {
      d.push_back(count(t));
      if (d.back() == 0) fail("dimensions must be positive");
    }
    return d;
  }

 private:
  static void split(const std::string& s, std::vector<std::string_view>& out) {
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j > i) out.emplace_back(s.data() + i, j - i);
      i = j;
    }
  }

  std::istream& is_;
  std::string source_;
  std::string line_;
  std::size_t line_no_ = 0;
};

std::size_t single(LineReader& r, const char* what) {
  const auto tok = r.require(what);
  if (tok.size() != 1) r.fail(std::string("expected a single value for ") + what);
  return r.count(tok[0]);
}

void put(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void put_dims(std::ostream& os, const Shape& d) {
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? " " : "") << d[i];
  os << '\n';
}

template <typename T, typename Read>
T load(const std::filesystem::path& p, Read read) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return read(in, p.string());
}

template <typename T, typename Write>
void save(const std::filesystem::path& p, const T& v, Write write) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  write(out, v);
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

DenseTensor read_dense(std::istream& is, const std::string& source) {
  LineReader r(is, source);
  const std::size_t order = single(r, "order");
  if (order == 0) r.fail("order must be positive");
  Shape dims = r.dims(order);
  std::vector<double> data;
  data.reserve(volume(dims));
  std::vector<std::string_view> tok;
  while (r.next(tok)) {
    for (auto t : tok) {
      if (data.size() == volume(dims)) r.fail("more values than prod(dims)");
      data.push_back(r.number(t));
    }
  }
  if (data.size() != volume(dims)) {
    r.fail("expected " + std::to_string(volume(dims)) + " values, found " + std::to_string(data.size()));
  }
  return DenseTensor(std::move(dims), std::move(data));
}

void write_dense(std::ostream& os, const DenseTensor& t) {
  os << t.order() << '\n';
  put_dims(os, t.dims());
  const std::size_t last = t.dims().back();
  const auto d = t.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    put(os, d[i]);
    os << ((i + 1) % last == 0 ? '\n' : ' ');
  }
}

KruskalModel read_kruskal(std::istream& is, const std::string& source) {
  LineReader r(is, source);
  const auto head = r.require("'N R' header");
  if (head.size() != 2) r.fail("header must be 'N R'");
  const std::size_t order = r.count(head[0]);
  const std::size_t rank = r.count(head[1]);
  if (order == 0) r.fail("order must be positive");
  Shape dims = r.dims(order);
  KruskalModel model(dims);
  for (std::size_t t = 0; t < rank; ++t) {
    const auto wtok = r.require("term weight");
    if (wtok.size() != 1) r.fail("weight line must hold one value");
    const double weight = r.number(wtok[0]);
    std::vector<std::vector<double>> factors;
    for (std::size_t m = 0; m < order; ++m) {
      const auto ftok = r.require("factor line");
      if (ftok.size() != dims[m]) r.fail("factor " + std::to_string(m + 1) + " needs " + std::to_string(dims[m]) + " values");
      std::vector<double> f;
      for (auto x : ftok) f.push_back(r.number(x));
      factors.push_back(std::move(f));
    }
    try {
      auto [atom, scale] = RankOneAtom::from_unnormalized(std::move(factors));
      model.append(weight * scale, std::move(atom));
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  std::vector<std::string_view> extra;
  if (r.next(extra)) r.fail("trailing data after " + std::to_string(rank) + " terms");
  return model;
}

void write_kruskal(std::ostream& os, const KruskalModel& m) {
  os << m.dims().size() << ' ' << m.rank() << '\n';
  put_dims(os, m.dims());
  for (const auto& term : m.terms()) {
    put(os, term.weight);
    os << '\n';
    for (const auto& f : term.atom.factors()) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) os << ' ';
        put(os, f[i]);
      }
      os << '\n';
    }
  }
}

SparseObservations read_observations(std::istream& is, const std::string& source) {
  LineReader r(is, source);
  const std::size_t order = single(r, "order");
  if (order == 0) r.fail("order must be positive");
  Shape dims = r.dims(order);
  std::vector<std::vector<std::size_t>> indices;
  std::vector<double> values;
  std::vector<std::string_view> tok;
  while (r.next(tok)) {
    if (tok.size() != order + 1) r.fail("observation line needs " + std::to_string(order) + " indices and a value");
    std::vector<std::size_t> idx(order);
    for (std::size_t m = 0; m < order; ++m) idx[m] = r.index(tok[m], dims[m]);
    indices.push_back(std::move(idx));
    values.push_back(r.number(tok[order]));
  }
  if (values.empty()) throw DegenerateInputError(source + ": no observations");
  try {
    return SparseObservations(std::move(dims), indices, std::move(values));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
}

void write_observations(std::ostream& os, const SparseObservations& obs) {
  os << obs.order() << '\n';
  put_dims(os, obs.dims());
  for (std::size_t e = 0; e < obs.size(); ++e) {
    for (std::size_t m = 0; m < obs.order(); ++m) os << obs.index(e, m) + 1 << ' ';
    put(os, obs.values()[e]);
    os << '\n';
  }
}

TaskSet read_tasks(std::istream& is, const std::string& source) {
  LineReader r(is, source);
  const auto head = r.require("'D N' header");
  if (head.size() != 2) r.fail("header must be 'D N'");
  const std::size_t dim = r.count(head[0]);
  const std::size_t order = r.count(head[1]);
  if (dim == 0 || order == 0) r.fail("D and N must be positive");
  Shape task_dims = r.dims(order);
  const std::size_t num_tasks = volume(task_dims);
  std::vector<std::vector<double>> xs(num_tasks), ys(num_tasks);
  std::vector<std::string_view> tok;
  while (r.next(tok)) {
    if (tok.size() != order + 1 + dim) {
      r.fail("sample line needs " + std::to_string(order) + " task indices, y and " + std::to_string(dim) + " features");
    }
    std::size_t t = 0;
    for (std::size_t m = 0; m < order; ++m) t = t * task_dims[m] + r.index(tok[m], task_dims[m]);
    ys[t].push_back(r.number(tok[order]));
    for (std::size_t j = 0; j < dim; ++j) xs[t].push_back(r.number(tok[order + 1 + j]));
  }
  std::vector<Task> tasks;
  for (std::size_t t = 0; t < num_tasks; ++t) {
    const std::size_t m = ys[t].size();
    tasks.push_back(Task{Matrix(m, dim, std::move(xs[t])), std::move(ys[t])});
  }
  return TaskSet(dim, std::move(task_dims), std::move(tasks));
}

void write_tasks(std::ostream& os, const TaskSet& tasks) {
  os << tasks.feature_dim() << ' ' << tasks.task_dims().size() << '\n';
  put_dims(os, tasks.task_dims());
  for (std::size_t t = 0; t < tasks.num_tasks(); ++t) {
    const auto idx = tasks.task_index(t);
    const Task& task = tasks.task(t);
    for (std::size_t i = 0; i < task.y.size(); ++i) {
      for (std::size_t m : idx) os << m + 1 << ' ';
      put(os, task.y[i]);
      for (double x : task.x.row(i)) {
        os << ' ';
        put(os, x);
      }
      os << '\n';
    }
  }
}

DenseTensor load_dense(const std::filesystem::path& p) { return load<DenseTensor>(p, read_dense); }
KruskalModel load_kruskal(const std::filesystem::path& p) { return load<KruskalModel>(p, read_kruskal); }
SparseObservations load_observations(const std::filesystem::path& p) {
  return load<SparseObservations>(p, read_observations);
}
TaskSet load_tasks(const std::filesystem::path& p) { return load<TaskSet>(p, read_tasks); }

void save_dense(const std::filesystem::path& p, const DenseTensor& t) { save(p, t, write_dense); }
void save_kruskal(const std::filesystem::path& p, const KruskalModel& m) { save(p, m, write_kruskal); }
void save_observations(const std::filesystem::path& p, const SparseObservations& obs) {
  save(p, obs, write_observations);
}
void save_tasks(const std::filesystem::path& p, const TaskSet& tasks) { save(p, tasks, write_tasks); }

}  // namespace homp::io
