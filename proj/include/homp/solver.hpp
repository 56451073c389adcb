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

// Greedy rank-one pursuit: select the atom best aligned with -grad F, then
// update weights with one of four strategies.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "homp/objective.hpp"
#include "homp/spectral.hpp"

namespace homp {

enum class Strategy { kHompLs, kHormpLs, kHoompLs, kHompG };

Strategy parse_strategy(std::string_view name);
std::string to_string(Strategy s);
bool needs_least_squares(Strategy s);

struct SolverConfig {
  Strategy strategy = Strategy::kHompLs;
  std::size_t max_rank = 500;
  double stop_tol = 1e-5;
  PowerIterConfig spectral;
  int bcu_sweeps = 1;
  // Stop after `stall_window` consecutive relative decreases below stall_tol.
  int stall_window = 5;
  double stall_tol = 1e-14;
};

void validate(const SolverConfig& cfg);

// Thrown by the step functions when the atom has no image under the
// objective's measurement map (or no alignment with the gradient).
class DegenerateAtomError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver state in measurement space. Atom images are shared between copies
// so passing a state by value is cheap relative to a fit.
struct FitState {
  explicit FitState(const Objective& obj);

  KruskalModel model;
  std::vector<double> prediction;  // sum_i weight_i * image_i
  std::vector<std::shared_ptr<const std::vector<double>>> images;
  std::vector<double> rhs;  // <image_i, b>_w
  // Weighted Gram of the images, filled lazily by the orthogonal step.
  std::vector<std::vector<double>> gram;
  double value = 0.0;
};

FitState step_homp_ls(const Objective& obj, FitState state, const RankOneAtom& atom);
FitState step_hormp_ls(const Objective& obj, FitState state, const RankOneAtom& atom);
FitState step_hoomp_ls(const Objective& obj, FitState state, const RankOneAtom& atom);
FitState step_homp_g(const Objective& obj, FitState state, const RankOneAtom& atom);
FitState apply_step(Strategy s, const Objective& obj, FitState state, const RankOneAtom& atom);

// <-grad F(model), atom>, computed in measurement space.
double atom_alignment(const Objective& obj, const FitState& state, std::span<const double> image);

struct TraceRecord {
  std::size_t k = 0;
  double objective = 0.0;
  double atom_value = 0.0;      // <-grad F(W^(k-1)), S^(k)>
  double grad12_norm = 0.0;     // ||grad F(W^(k-1))_(1,2)||_2
  double ratio = 0.0;           // atom_value / grad12_norm
  double grad_fro = 0.0;        // ||grad F(W^(k-1))||_F
  double min_psi = 1.0;         // min psi over residuals of W^(k-1)
  double elapsed_ms = 0.0;
  std::vector<double> weights;
};

enum class StopReason { kMaxRank, kTolerance, kZeroGradient, kDegenerate, kStalled };
std::string to_string(StopReason r);

struct FitTrace {
  std::vector<TraceRecord> records;  // records[0] is the empty model
  StopReason reason = StopReason::kMaxRank;

  void write_csv(std::ostream& os, bool include_elapsed = true) const;
};

struct FitResult {
  KruskalModel model;
  FitTrace trace;
};

FitResult fit(const Objective& obj, const SolverConfig& cfg);

// Least-squares line y = a + b x; returns slope b and R^2.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Fit of log F(k) against k over the trailing `fraction` of trace records
// with positive objective.
LinearFit log_linear_tail(const FitTrace& trace, double fraction = 0.8);

}  // namespace homp
