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

#include "homp/solver.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "homp/kernels.hpp"

namespace homp {
namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_least_squares(const Objective& obj, Strategy s) {
  if (!obj.loss().is_least_squares()) {
    throw std::invalid_argument("strategy " + to_string(s) + " needs the least-squares loss, got " +
                                obj.loss().to_string());
  }
}

std::shared_ptr<const std::vector<double>> image_of(const Objective& obj, const RankOneAtom& atom) {
  return std::make_shared<const std::vector<double>>(obj.measure(atom));
}

std::vector<double> residual(const Objective& obj, std::span<const double> prediction) {
  const auto b = obj.targets();
  std::vector<double> r(prediction.begin(), prediction.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

void push_atom(const Objective& obj, FitState& state, const RankOneAtom& atom, double weight,
               std::shared_ptr<const std::vector<double>> image) {
  state.rhs.push_back(obj.weighted_dot(*image, obj.targets()));
  state.images.push_back(std::move(image));
  state.model.append(weight, atom);
}

// Line-search candidate shared by the least-squares steps.
struct LineStep {
  double alpha;
  std::shared_ptr<const std::vector<double>> image;
};

LineStep homp_line(const Objective& obj, const FitState& state, const RankOneAtom& atom) {
  auto image = image_of(obj, atom);
  const double ss = obj.weighted_dot(*image, *image);
  if (!(ss > 0.0)) throw DegenerateAtomError("atom has no image on the observations");
  const auto r = residual(obj, state.prediction);
  return {-obj.weighted_dot(r, *image) / ss, std::move(image)};
}

FitState finish_line(const Objective& obj, FitState state, const RankOneAtom& atom, const LineStep& step) {
  kernels::axpy(step.alpha, step.image->data(), state.prediction.data(), state.prediction.size());
  push_atom(obj, state, atom, step.alpha, step.image);
  state.value = obj.value_at(state.prediction);
  return state;
}

void extend_gram(const Objective& obj, FitState& state) {
  const std::size_t k = state.images.size();
  for (std::size_t i = state.gram.size(); i < k; ++i) {
    std::vector<double> row(i + 1);
    for (std::size_t j = 0; j <= i; ++j) row[j] = obj.weighted_dot(*state.images[i], *state.images[j]);
    state.gram.push_back(std::move(row));
  }
}

}  // namespace

Strategy parse_strategy(std::string_view name) {
  if (name == "homp-ls") return Strategy::kHompLs;
  if (name == "hormp-ls") return Strategy::kHormpLs;
  if (name == "hoomp-ls") return Strategy::kHoompLs;
  if (name == "homp-g") return Strategy::kHompG;
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "' (expected homp-ls, hormp-ls, hoomp-ls or homp-g)");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kHompLs: return "homp-ls";
    case Strategy::kHormpLs: return "hormp-ls";
    case Strategy::kHoompLs: return "hoomp-ls";
    case Strategy::kHompG: return "homp-g";
  }
  return "?";
}

bool needs_least_squares(Strategy s) { return s != Strategy::kHompG; }

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::kMaxRank: return "max-rank";
    case StopReason::kTolerance: return "tolerance";
    case StopReason::kZeroGradient: return "zero-gradient";
    case StopReason::kDegenerate: return "degenerate-atom";
    case StopReason::kStalled: return "stalled";
  }
  return "?";
}

void validate(const SolverConfig& cfg) {
  if (cfg.max_rank < 1) throw std::invalid_argument("max rank K must be >= 1");
  if (!(cfg.stop_tol >= 0.0)) throw std::invalid_argument("stop_tol must be >= 0");
  if (cfg.bcu_sweeps < 0) throw std::invalid_argument("bcu_sweeps must be >= 0");
  if (cfg.stall_window < 1) throw std::invalid_argument("stall_window must be >= 1");
  validate(cfg.spectral);
}

FitState::FitState(const Objective& obj)
    : model(obj.dims()), prediction(obj.num_measurements(), 0.0), value(obj.value_at(prediction)) {}

double atom_alignment(const Objective& obj, const FitState& state, std::span<const double> image) {
  const auto b = obj.targets();
  const auto w = obj.weights();
  const LossFunction& l = obj.loss();
  double s = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) s -= w[i] * l.derivative(state.prediction[i] - b[i]) * image[i];
  return s;
}

FitState step_homp_ls(const Objective& obj, FitState state, const RankOneAtom& atom) {
  require_least_squares(obj, Strategy::kHompLs);
  const LineStep step = homp_line(obj, state, atom);
  return finish_line(obj, std::move(state), atom, step);
}

FitState step_hormp_ls(const Objective& obj, FitState state, const RankOneAtom& atom) {
  require_least_squares(obj, Strategy::kHormpLs);
  const LineStep line = homp_line(obj, state, atom);
  const auto& p = state.prediction;
  const auto& s = *line.image;
  const auto b = obj.targets();
  const double pp = obj.weighted_dot(p, p);
  const double ps = obj.weighted_dot(p, s);
  const double ss = obj.weighted_dot(s, s);
  const double det = pp * ss - ps * ps;
  if (!(pp > 0.0) || det <= 1e-12 * pp * ss) return finish_line(obj, std::move(state), atom, line);

  const double pb = obj.weighted_dot(p, b);
  const double sb = obj.weighted_dot(s, b);
  const double a1 = (ss * pb - ps * sb) / det;
  const double a2 = (pp * sb - ps * pb) / det;

  std::vector<double> pred(p.size());
  for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = a1 * p[i] + a2 * s[i];
  const double value = obj.value_at(pred);

  // Round-off can only lose against the pinned alpha_1 = 1 candidate.
  FitState fallback = finish_line(obj, state, atom, line);
  if (!(value <= fallback.value)) return fallback;

  state.model.scale_weights(a1);
  state.prediction = std::move(pred);
  push_atom(obj, state, atom, a2, line.image);
  state.value = value;
  return state;
}

FitState step_hoomp_ls(const Objective& obj, FitState state, const RankOneAtom& atom) {
  require_least_squares(obj, Strategy::kHoompLs);
  const LineStep line = homp_line(obj, state, atom);
  FitState fallback = finish_line(obj, state, atom, line);

  push_atom(obj, state, atom, 0.0, line.image);
  extend_gram(obj, state);
  const auto k = static_cast<Eigen::Index>(state.images.size());
  Eigen::MatrixXd g(k, k);
  double trace = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      g(i, j) = g(j, i) = state.gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    trace += g(i, i);
  }
  const Eigen::Map<const Eigen::VectorXd> c(state.rhs.data(), k);
  // Exact normal equations unless the Gram is numerically singular (e.g. a
  // repeated atom); then a tiny ridge keeps the solve well posed.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.rcond() > 1e-13)) {
    g.diagonal().array() += 1e-12 * trace / static_cast<double>(k);
    ldlt.compute(g);
  }
  Eigen::VectorXd alpha = ldlt.solve(c);
  alpha += ldlt.solve(c - g * alpha);

  std::vector<double> pred(state.prediction.size(), 0.0);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!std::isfinite(alpha(i))) return fallback;
    kernels::axpy(alpha(i), state.images[static_cast<std::size_t>(i)]->data(), pred.data(), pred.size());
  }
  const double value = obj.value_at(pred);
  if (!(value <= fallback.value)) return fallback;

  for (Eigen::Index i = 0; i < k; ++i) state.model.set_weight(static_cast<std::size_t>(i), alpha(i));
  state.prediction = std::move(pred);
  state.value = value;
  return state;
}

FitState step_homp_g(const Objective& obj, FitState state, const RankOneAtom& atom) {
  const double lip = obj.lipschitz();
  if (!(lip > 0.0)) throw std::invalid_argument("homp-g needs a positive Lipschitz constant");
  auto image = image_of(obj, atom);
  if (!(obj.weighted_dot(*image, *image) > 0.0)) throw DegenerateAtomError("atom has no image on the observations");
  const double alpha = atom_alignment(obj, state, *image) / lip;
  return finish_line(obj, std::move(state), atom, LineStep{alpha, std::move(image)});
}

FitState apply_step(Strategy s, const Objective& obj, FitState state, const RankOneAtom& atom) {
  switch (s) {
    case Strategy::kHompLs: return step_homp_ls(obj, std::move(state), atom);
    case Strategy::kHormpLs: return step_hormp_ls(obj, std::move(state), atom);
    case Strategy::kHoompLs: return step_hoomp_ls(obj, std::move(state), atom);
    case Strategy::kHompG: return step_homp_g(obj, std::move(state), atom);
  }
  throw std::invalid_argument("unknown strategy");
}

void FitTrace::write_csv(std::ostream& os, bool include_elapsed) const {
  os << "k,objective,atom_value,grad12_norm_est,ratio,elapsed_ms\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,", r.k, r.objective, r.atom_value, r.grad12_norm,
                  r.ratio);
    os << buf;
    if (include_elapsed) {
      std::snprintf(buf, sizeof buf, "%.3f", r.elapsed_ms);
      os << buf;
    }
    os << '\n';
  }
}

FitResult fit(const Objective& obj, const SolverConfig& cfg) {
  validate(cfg);
  if (needs_least_squares(cfg.strategy)) require_least_squares(obj, cfg.strategy);
  if (cfg.strategy == Strategy::kHompG && !(obj.lipschitz() > 0.0)) {
    throw std::invalid_argument("homp-g needs a positive Lipschitz constant");
  }

  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };

  FitState state(obj);
  FitTrace trace;
  trace.records.push_back(TraceRecord{0, state.value, 0.0, 0.0, 0.0, 0.0, 1.0, elapsed(), {}});
  trace.reason = StopReason::kMaxRank;
  int stalled = 0;

  for (std::size_t k = 1; k <= cfg.max_rank; ++k) {
    if (state.value <= cfg.stop_tol) {
      trace.reason = StopReason::kTolerance;
      break;
    }
    DenseTensor g = obj.gradient_at(state.prediction);
    for (double& x : g.data()) x = -x;
    if (g.is_zero()) {
      trace.reason = StopReason::kZeroGradient;
      break;
    }

    PowerIterConfig spectral = cfg.spectral;
    spectral.seed = mix(cfg.spectral.seed ^ k);
    std::optional<FitState> next;
    for (int attempt = 0; attempt < 2 && !next; ++attempt) {
      auto sel = select_atom(g, spectral, cfg.bcu_sweeps);
      if (!sel) break;
      try {
        next = apply_step(cfg.strategy, obj, state, sel->atom);
      } catch (const DegenerateAtomError&) {
        spectral.seed = mix(spectral.seed);
      }
    }
    if (!next) {
      trace.reason = StopReason::kDegenerate;
      break;
    }

    TraceRecord rec;
    rec.k = k;
    rec.objective = next->value;
    rec.atom_value = atom_alignment(obj, state, *next->images.back());
    rec.grad12_norm = unfold12_spectral_norm(g);
    rec.ratio = rec.grad12_norm > 0.0 ? rec.atom_value / rec.grad12_norm : 0.0;
    rec.grad_fro = g.frobenius_norm();
    rec.min_psi = obj.min_psi(state.prediction);
    rec.weights = next->model.weights();

    const double prev = state.value;
    state = std::move(*next);
    rec.elapsed_ms = elapsed();
    trace.records.push_back(std::move(rec));

    if (prev > 0.0 && (prev - state.value) / prev < cfg.stall_tol) {
      if (++stalled >= cfg.stall_window) {
        trace.reason = StopReason::kStalled;
        break;
      }
    } else {
      stalled = 0;
    }
    if (k == cfg.max_rank) trace.reason = state.value <= cfg.stop_tol ? StopReason::kTolerance : StopReason::kMaxRank;
  }
  return FitResult{std::move(state.model), std::move(trace)};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

LinearFit log_linear_tail(const FitTrace& trace, double fraction) {
  std::vector<double> ks, logs;
  for (const auto& r : trace.records) {
    if (r.objective > 0.0) {
      ks.push_back(static_cast<double>(r.k));
      logs.push_back(std::log(r.objective));
    }
  }
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ks.size())));
  const std::size_t from = ks.size() - std::min(keep, ks.size());
  return fit_line(std::span(ks).subspan(from), std::span(logs).subspan(from));
}

}  // namespace homp
