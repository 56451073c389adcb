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

// homp: data generation, fits, spectral tools and missing-ratio sweeps.
//
// Exit status: 0 success, 1 usage or parse error, 2 degenerate input.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "homp/generators.hpp"
#include "homp/io.hpp"
#include "homp/solver.hpp"
#include "homp/spectral.hpp"
#include "homp/oracle.hpp"

namespace {

using namespace homp;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDegenerate = 2;

struct DegenerateInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverFlags {
  std::string strategy = "homp-ls";
  std::size_t k = 500;
  double stop_tol = 1e-5;
  std::string loss = "ls";
  std::uint64_t seed = 0;
  int bcu_sweeps = 1;
  int power_iters = 30;
  double power_tol = 1e-8;

  void add_to(CLI::App& app) {
    app.add_option("--strategy", strategy, "homp-ls, hormp-ls, hoomp-ls or homp-g")->capture_default_str();
    app.add_option("--K", k, "maximum rank (iterations)")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--stop-tol", stop_tol, "stop once F <= stop-tol")->capture_default_str();
    app.add_option("--loss", loss, "ls, huber:d, ghuber:d:p, l1l2, fair:s, cauchy:s")->capture_default_str();
    app.add_option("--seed", seed, "power-iteration seed")->capture_default_str();
    app.add_option("--bcu-sweeps", bcu_sweeps)->capture_default_str();
    app.add_option("--power-iters", power_iters)->capture_default_str();
    app.add_option("--power-tol", power_tol)->capture_default_str();
  }

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.strategy = parse_strategy(strategy);
    cfg.max_rank = k;
    cfg.stop_tol = stop_tol;
    cfg.bcu_sweeps = bcu_sweeps;
    cfg.spectral.max_iters = power_iters;
    cfg.spectral.tol = power_tol;
    cfg.spectral.seed = seed;
    return cfg;
  }
};

Shape parse_dims(const std::vector<std::size_t>& v, const char* what) {
  if (v.empty()) throw CLI::ValidationError(what, "needs at least one dimension");
  for (std::size_t d : v) {
    if (d == 0) throw CLI::ValidationError(what, "dimensions must be positive");
  }
  return Shape(v.begin(), v.end());
}

void write_trace(const fs::path& p, const FitTrace& trace) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  trace.write_csv(out);
}

void print_fit(const FitResult& r, std::ostream& os) {
  const auto& last = r.trace.records.back();
  os << "iterations " << last.k << "\nobjective " << last.objective << "\nrank " << r.model.rank()
     << "\nstop " << to_string(r.trace.reason) << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Rewrites `--config FILE` into flags placed ahead of the command-line ones.
// Single-value options keep their last occurrence, so explicit flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> rest;
  std::string config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config.empty()) return args;
  std::ifstream in(config);
  if (!in) throw std::runtime_error("cannot open config " + config);
  std::vector<std::string> flags;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error(config + ":" + std::to_string(line_no) + ": expected key = value");
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error(config + ":" + std::to_string(line_no) + ": empty key");
    flags.push_back("--" + key);
    flags.push_back(value);
  }
  std::vector<std::string> out{args[0]};
  if (!rest.empty()) out.push_back(rest.front());
  out.insert(out.end(), flags.begin(), flags.end());
  if (!rest.empty()) out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

unsigned thread_cap() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HOMP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy rank-one pursuit for low-rank tensor learning"};
  app.require_subcommand(1);
  app.footer("Every subcommand accepts --config FILE with `key = value` lines; flags override it.");
  app.set_help_all_flag("--help-all");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // gen-completion
  CompletionConfig gc;
  std::vector<std::size_t> gc_dims{30, 30, 30};
  std::vector<double> gc_range{-1.0, 1.0};
  std::string gc_out, gc_truth;
  auto* gen_c = app.add_subcommand("gen-completion", "synthetic completion instance");
  gen_c->add_option("--dims", gc_dims)->delimiter(',')->capture_default_str();
  gen_c->add_option("--rank", gc.cp_rank)->capture_default_str();
  gen_c->add_option("--mr", gc.missing_ratio, "missing ratio")->capture_default_str();
  gen_c->add_option("--noise", gc.noise)->capture_default_str();
  gen_c->add_option("--outlier-frac", gc.outlier_frac)->capture_default_str();
  gen_c->add_option("--outlier-range", gc_range)->delimiter(',')->expected(2);
  gen_c->add_option("--truth-scale", gc.truth_scale)->capture_default_str();
  gen_c->add_option("--seed", gc.seed)->capture_default_str();
  gen_c->add_option("--out", gc_out, "observation file")->required();
  gen_c->add_option("--truth", gc_truth, "ground-truth Kruskal model file");

  // gen-mlmtl
  std::size_t gm_dim = 10, gm_rank = 3, gm_samples = 40;
  std::vector<std::size_t> gm_task_dims{3, 5};
  double gm_noise = 0.0;
  std::uint64_t gm_seed = 0;
  std::string gm_out, gm_truth;
  auto* gen_m = app.add_subcommand("gen-mlmtl", "planted multilinear multitask instance");
  gen_m->add_option("--D", gm_dim, "feature dimension")->capture_default_str();
  gen_m->add_option("--task-dims", gm_task_dims)->delimiter(',')->capture_default_str();
  gen_m->add_option("--rank", gm_rank)->capture_default_str();
  gen_m->add_option("--samples", gm_samples, "samples per task")->capture_default_str();
  gen_m->add_option("--noise", gm_noise)->capture_default_str();
  gen_m->add_option("--seed", gm_seed)->capture_default_str();
  gen_m->add_option("--out", gm_out)->required();
  gen_m->add_option("--truth", gm_truth);

  // complete
  SolverFlags cf;
  std::string c_in, c_model, c_trace, c_truth;
  auto* complete = app.add_subcommand("complete", "fit a completion instance");
  complete->add_option("input", c_in, "observation file")->required();
  cf.add_to(*complete);
  complete->add_option("--model", c_model, "output Kruskal model file");
  complete->add_option("--trace", c_trace, "output trace CSV");
  complete->add_option("--truth", c_truth, "ground truth for the relative error");

  // mlmtl
  SolverFlags mf;
  std::string m_in, m_model, m_trace;
  double m_lambda = 0.0;
  bool m_ridge = false;
  auto* mlmtl = app.add_subcommand("mlmtl", "fit a multilinear multitask instance");
  mlmtl->add_option("input", m_in, "task file")->required();
  mf.add_to(*mlmtl);
  mlmtl->add_flag("--ridge", m_ridge, "use the ridge reformulation");
  mlmtl->add_option("--lambda", m_lambda, "ridge parameter")->capture_default_str();
  mlmtl->add_option("--model", m_model);
  mlmtl->add_option("--trace", m_trace);

  // rank1
  std::string r_in;
  PowerIterConfig r_cfg;
  int r_sweeps = 1;
  auto* rank1 = app.add_subcommand("rank1", "approximate leading rank-one term of a dense tensor");
  rank1->add_option("input", r_in)->required();
  rank1->add_option("--seed", r_cfg.seed)->capture_default_str();
  rank1->add_option("--power-iters", r_cfg.max_iters)->capture_default_str();
  rank1->add_option("--power-tol", r_cfg.tol)->capture_default_str();
  rank1->add_option("--bcu-sweeps", r_sweeps)->capture_default_str();

  // oracle
  std::string o_in;
  oracle::OracleConfig o_cfg;
  auto* orc = app.add_subcommand("oracle", "multi-start brute-force spectral norm (small tensors)");
  orc->add_option("input", o_in)->required();
  orc->add_option("--starts", o_cfg.starts)->capture_default_str();
  orc->add_option("--seed", o_cfg.seed)->capture_default_str();
  orc->add_option("--tol", o_cfg.tol)->capture_default_str();

  // sweep
  std::vector<std::size_t> s_dims{30, 30, 30};
  std::size_t s_rank = 5, s_seeds = 10;
  std::string s_mr = "0.5,0.6,0.7,0.8,0.9,0.95,0.99", s_strategies = "homp-ls,hormp-ls,hoomp-ls", s_out, s_cells;
  SolverFlags sf;
  auto* sweep = app.add_subcommand("sweep", "missing-ratio sweep over seeds and strategies");
  sweep->add_option("--dims", s_dims)->delimiter(',')->capture_default_str();
  sweep->add_option("--rank", s_rank)->capture_default_str();
  sweep->add_option("--mr", s_mr, "comma-separated missing ratios")->capture_default_str();
  sweep->add_option("--strategies", s_strategies)->capture_default_str();
  sweep->add_option("--seeds", s_seeds, "instances per cell")->capture_default_str();
  sweep->add_option("--K", sf.k)->capture_default_str();
  sweep->add_option("--stop-tol", sf.stop_tol)->capture_default_str();
  sweep->add_option("--bcu-sweeps", sf.bcu_sweeps)->capture_default_str();
  sweep->add_option("--out", s_out, "summary CSV")->required();
  sweep->add_option("--cells-dir", s_cells, "directory for per-run trace CSVs");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "homp: " << e.what() << '\n';
    return kUsage;
  }
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen_c) {
      gc.dims = parse_dims(gc_dims, "--dims");
      gc.outlier_range = {gc_range.at(0), gc_range.at(1)};
      const CompletionInstance inst = gen_completion(gc);
      io::save_observations(gc_out, inst.obs);
      if (!gc_truth.empty()) io::save_kruskal(gc_truth, inst.truth);
      std::cout << "observed " << inst.obs.size() << "\noutliers " << inst.outlier_offsets.size() << '\n';
    } else if (*gen_m) {
      KruskalModel truth(Shape{1});
      const TaskSet tasks = gen_mlmtl(gm_dim, parse_dims(gm_task_dims, "--task-dims"), gm_rank, gm_samples,
                                      gm_noise, gm_seed, &truth);
      io::save_tasks(gm_out, tasks);
      if (!gm_truth.empty()) io::save_kruskal(gm_truth, truth);
      std::cout << "tasks " << tasks.num_tasks() << '\n';
    } else if (*complete) {
      const SolverConfig cfg = cf.config();
      CompletionObjective obj(io::load_observations(c_in), LossFunction::parse(cf.loss));
      const FitResult r = fit(obj, cfg);
      print_fit(r, std::cout);
      if (!c_truth.empty()) {
        const KruskalModel truth = io::load_kruskal(c_truth);
        if (truth.dims() != obj.dims()) {
          throw std::invalid_argument("dims of " + c_truth + " do not match " + c_in);
        }
        std::cout << "relative_error " << relative_error(r.model, truth) << '\n';
      } else {
        std::cout << "relative_error_observed " << relative_error_observed(obj, r.model) << '\n';
      }
      if (!c_model.empty()) io::save_kruskal(c_model, r.model);
      if (!c_trace.empty()) write_trace(c_trace, r.trace);
    } else if (*mlmtl) {
      const SolverConfig cfg = mf.config();
      TaskSet tasks = io::load_tasks(m_in);
      const LossFunction loss = LossFunction::parse(mf.loss);
      const MlmtlObjective obj = m_ridge ? MlmtlObjective::ridge(std::move(tasks), loss, m_lambda)
                                         : MlmtlObjective(std::move(tasks), loss);
      const FitResult r = fit(obj, cfg);
      print_fit(r, std::cout);
      if (m_ridge) std::cout << "ridge_constant " << obj.ridge_constant() << '\n';
      if (!m_model.empty()) io::save_kruskal(m_model, r.model);
      if (!m_trace.empty()) write_trace(m_trace, r.trace);
    } else if (*rank1) {
      validate(r_cfg);
      const DenseTensor a = io::load_dense(r_in);
      const auto res = select_atom(a, r_cfg, r_sweeps);
      if (!res) throw DegenerateInput(r_in + ": zero tensor");
      std::printf("value %.17g\ncertified_lower_bound %.17g\nalphas", res->value, res->certified_lower_bound);
      for (double al : res->alphas) std::printf(" %.17g", al);
      std::printf("\n");
      for (std::size_t m = 0; m < res->atom.order(); ++m) {
        std::printf("factor %zu", m + 1);
        for (double x : res->atom.factor(m)) std::printf(" %.17g", x);
        std::printf("\n");
      }
    } else if (*orc) {
      const DenseTensor a = io::load_dense(o_in);
      if (a.is_zero()) throw DegenerateInput(o_in + ": zero tensor");
      const auto res = oracle::spectral_norm_bruteforce(a, o_cfg);
      std::printf("value %.17g\n", res.value);
      for (std::size_t m = 0; m < res.atom.order(); ++m) {
        std::printf("factor %zu", m + 1);
        for (double x : res.atom.factor(m)) std::printf(" %.17g", x);
        std::printf("\n");
      }
    } else if (*sweep) {
      const Shape dims = parse_dims(s_dims, "--dims");
      std::vector<double> mrs;
      for (const auto& t : split_list(s_mr)) mrs.push_back(std::stod(t));
      std::vector<Strategy> strategies;
      for (const auto& t : split_list(s_strategies)) strategies.push_back(parse_strategy(t));
      if (mrs.empty() || strategies.empty() || s_seeds == 0) throw std::invalid_argument("empty sweep grid");
      if (!s_cells.empty()) fs::create_directories(s_cells);

      struct Cell {
        double mr;
        Strategy strategy;
        std::size_t seed;
        double rel_error = 0.0, iterations = 0.0, seconds = 0.0;
      };
      std::vector<Cell> cells;
      for (double mr : mrs)
        for (Strategy st : strategies)
          for (std::size_t s = 0; s < s_seeds; ++s) cells.push_back({mr, st, s});

      std::atomic<std::size_t> next{0};
      std::mutex err_mu;
      std::string first_error;
      auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
          Cell& c = cells[i];
          try {
            CompletionConfig g;
            g.dims = dims;
            g.cp_rank = s_rank;
            g.missing_ratio = c.mr;
            g.seed = c.seed;
            const CompletionInstance inst = gen_completion(g);
            CompletionObjective obj(inst.obs, LossFunction::least_squares());
            SolverConfig cfg = sf.config();
            cfg.strategy = c.strategy;
            const FitResult r = fit(obj, cfg);
            c.rel_error = relative_error(r.model, inst.truth);
            c.iterations = static_cast<double>(r.trace.records.back().k);
            c.seconds = r.trace.records.back().elapsed_ms / 1000.0;
            if (!s_cells.empty()) {
              char name[128];
              std::snprintf(name, sizeof name, "mr%.4g_%s_seed%zu.csv", c.mr, to_string(c.strategy).c_str(), c.seed);
              write_trace(fs::path(s_cells) / name, r.trace);
            }
          } catch (const std::exception& e) {
            std::lock_guard lock(err_mu);
            if (first_error.empty()) first_error = e.what();
          }
        }
      };
      const unsigned n = std::min<unsigned>(thread_cap(), static_cast<unsigned>(cells.size()));
      std::vector<std::thread> pool;
      for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();
      if (!first_error.empty()) throw std::runtime_error(first_error);

      std::ofstream out(s_out);
      if (!out) throw std::runtime_error("cannot write " + s_out);
      out << "mr,strategy,mean_rel_error,mean_iterations,mean_seconds\n";
      std::map<std::pair<double, std::string>, std::vector<const Cell*>> groups;
      for (const Cell& c : cells) groups[{c.mr, to_string(c.strategy)}].push_back(&c);
      for (const auto& [key, group] : groups) {
        double e = 0.0, it = 0.0, sec = 0.0;
        for (const Cell* c : group) {
          e += c->rel_error;
          it += c->iterations;
          sec += c->seconds;
        }
        const double n_runs = static_cast<double>(group.size());
        char line[256];
        std::snprintf(line, sizeof line, "%.6g,%s,%.17g,%.17g,%.6f\n", key.first, key.second.c_str(), e / n_runs,
                      it / n_runs, sec / n_runs);
        out << line;
      }
      std::cout << "cells " << cells.size() << "\nrows " << groups.size() << '\n';
    }
  } catch (const DegenerateInput& e) {
    std::cerr << "homp: " << e.what() << '\n';
    return kDegenerate;
  } catch (const io::DegenerateInputError& e) {
    std::cerr << "homp: " << e.what() << '\n';
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "homp: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
