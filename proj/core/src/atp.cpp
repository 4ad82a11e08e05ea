// Copyright 2026 The atpqnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "atpqnn/atp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>

#include "atpqnn/error.hpp"
#include "atpqnn/pipeline.hpp"

namespace atpqnn::atp {
namespace {

constexpr double kCurvatureFloor = 1e-12;

double project(double tau, double tau_max) { return std::clamp(tau, 0.0, tau_max); }

}  // namespace

ObjectiveFn analytic_objective(std::function<double(double)> f) {
  return [f = std::move(f)](double tau) {
    const double v = f(tau);
    return ObjectiveValue{v, -v, std::numeric_limits<double>::quiet_NaN()};
  };
}

MemoizedObjective::MemoizedObjective(ObjectiveFn fn, double tol) : fn_(std::move(fn)), tol_(tol) {}

std::optional<std::size_t> MemoizedObjective::find_locked(double tau) const {
  auto it = index_.lower_bound(tau - tol_);
  if (it != index_.end() && it->first <= tau + tol_) return it->second;
  return std::nullopt;
}

ObjectiveValue MemoizedObjective::operator()(double tau) {
  {
    std::shared_lock lock(mu_);
    if (auto hit = find_locked(tau)) {
      const auto& e = trace_[*hit];
      return {e.value, e.accuracy, e.entropy};
    }
  }
  const auto start = std::chrono::steady_clock::now();
  const ObjectiveValue v = fn_(tau);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::unique_lock lock(mu_);
  if (auto hit = find_locked(tau)) {
    const auto& e = trace_[*hit];
    return {e.value, e.accuracy, e.entropy};
  }
  index_.emplace(tau, trace_.size());
  trace_.push_back({tau, v.value, v.accuracy, v.entropy, secs});
  return v;
}

std::vector<TraceEntry> MemoizedObjective::trace() const {
  std::shared_lock lock(mu_);
  return trace_;
}

std::size_t MemoizedObjective::evaluations() const {
  std::shared_lock lock(mu_);
  return trace_.size();
}

void ThresholdOptions::validate() const {
  if (!(tau_max > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tau_max must be > 0");
  if (!(grad_step > 0.0 && grad_step < tau_max)) {
    throw Error(ErrorKind::kInvalidArgument, "grad_step must lie in (0, tau_max)");
  }
  if (!(tolerance > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tolerance must be > 0");
  if (history == 0) throw Error(ErrorKind::kInvalidArgument, "history size must be >= 1");
  if (grid_points < 2) throw Error(ErrorKind::kInvalidArgument, "grid needs >= 2 points");
}

double numeric_grad(MemoizedObjective& f, double tau, double h, double tau_max) {
  const double lo = tau - h;
  const double hi = tau + h;
  if (lo < 0.0) return (f(hi).value - f(tau).value) / h;
  if (hi > tau_max) return (f(tau).value - f(lo).value) / h;
  return (f(hi).value - f(lo).value) / (2 * h);
}

double lbfgs_direction(const LbfgsState& state, double grad) {
  const auto& hist = state.history;
  std::vector<double> alpha(hist.size());
  double q = grad;
  for (std::size_t i = hist.size(); i-- > 0;) {
    const double rho = 1.0 / (hist[i].y * hist[i].s);
    alpha[i] = rho * hist[i].s * q;
    q -= alpha[i] * hist[i].y;
  }
  double gamma = 1.0;
  if (!hist.empty()) gamma = (hist.back().s * hist.back().y) / (hist.back().y * hist.back().y);
  double r = gamma * q;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double rho = 1.0 / (hist[i].y * hist[i].s);
    const double beta = rho * hist[i].y * r;
    r += hist[i].s * (alpha[i] - beta);
  }
  return -r;
}

StepResult lbfgsb_step(LbfgsState& state, MemoizedObjective& f, const ThresholdOptions& options) {
  const double d = lbfgs_direction(state, state.grad);
  double alpha = 1.0;
  for (std::size_t b = 0; b <= options.max_backtracks; ++b, alpha *= 0.5) {
    const double trial = project(state.tau + alpha * d, options.tau_max);
    const double step = trial - state.tau;
    if (step == 0.0) break;
    const double value = f(trial).value;
    if (value <= state.value + options.armijo_c * state.grad * step) {
      const double grad = numeric_grad(f, trial, options.grad_step, options.tau_max);
      const CurvaturePair pair{step, grad - state.grad};
      if (pair.s * pair.y > kCurvatureFloor) {
        state.history.push_back(pair);
        while (state.history.size() > options.history) state.history.pop_front();
      }
      state.tau = trial;
      state.value = value;
      state.grad = grad;
      ++state.iteration;
      return {trial, false};
    }
  }
  return {state.tau, true};
}

namespace {

enum class RunOutcome { kConverged, kPlateau, kStalled, kExhausted };

RunOutcome run_lbfgs(LbfgsState& state, MemoizedObjective& f, const ThresholdOptions& opt,
                     std::size_t& iterations) {
  for (std::size_t it = 0;; ++it) {
    // An exactly zero difference quotient means a flat accuracy plateau, not
    // a stationary point.
    if (state.grad == 0.0) return RunOutcome::kPlateau;
    const double projected = project(state.tau - state.grad, opt.tau_max) - state.tau;
    if (std::abs(projected) < opt.tolerance) return RunOutcome::kConverged;
    if (it >= opt.max_iters) return RunOutcome::kExhausted;
    if (lbfgsb_step(state, f, opt).stalled) return RunOutcome::kStalled;
    ++iterations;
  }
}

LbfgsState start_at(MemoizedObjective& f, double tau, const ThresholdOptions& opt) {
  LbfgsState s;
  s.tau = tau;
  s.value = f(tau).value;
  s.grad = numeric_grad(f, tau, opt.grad_step, opt.tau_max);
  return s;
}

}  // namespace

ThresholdResult optimize_threshold(const ThresholdProblem& problem) {
  const ThresholdOptions& opt = problem.options;
  opt.validate();
  if (!problem.objective) throw Error(ErrorKind::kInvalidArgument, "missing objective");
  MemoizedObjective f(problem.objective);

  ThresholdResult result;
  const double tau0 = opt.tau_max / 2;
  if (opt.max_iters == 0) {
    f(tau0);
  } else {
    LbfgsState state = start_at(f, tau0, opt);
    const RunOutcome r = run_lbfgs(state, f, opt, result.iterations);
    result.converged = r == RunOutcome::kConverged;
    if (r == RunOutcome::kPlateau || r == RunOutcome::kStalled) {
      result.used_fallback = true;
      double best_tau = 0.0;
      double best_value = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < opt.grid_points; ++i) {
        const double tau =
            opt.tau_max * static_cast<double>(i) / static_cast<double>(opt.grid_points - 1);
        const double v = f(tau).value;
        if (v <= best_value) {
          best_value = v;
          best_tau = tau;
        }
      }
      LbfgsState local = start_at(f, best_tau, opt);
      const RunOutcome refined = run_lbfgs(local, f, opt, result.iterations);
      result.converged = refined == RunOutcome::kConverged || refined == RunOutcome::kPlateau;
    }
  }

  result.evaluations = f.trace();
  const TraceEntry* best = &result.evaluations.front();
  // Equal objective values resolve toward the larger threshold.
  for (const auto& e : result.evaluations) {
    if (e.value < best->value || (e.value == best->value && e.tau > best->tau)) best = &e;
  }
  result.tau_star = best->tau;
  result.best_value = best->value;
  result.best_accuracy = -best->value;
  result.entropy_at_star = best->entropy;
  return result;
}

PruningOutcome evaluate_threshold(const PruningSetup& setup, double tau) {
  if (!setup.train || !setup.test) {
    throw Error(ErrorKind::kInvalidArgument, "pruning setup needs train and test splits");
  }
  const auto& scoring = setup.validation ? *setup.validation : *setup.test;
  PruningOutcome out;
  out.mask = pipeline::atp_mask(*setup.train, tau);
  const auto encoder = encoders::Encoder::atp(out.mask, setup.compact);
  const auto train = pipeline::encode_samples(*setup.train, encoder);
  const auto score = pipeline::encode_samples(scoring, encoder);
  const auto params0 = qnn::ModelParams::random(encoder.data_qubits(), setup.train_config.seed);
  out.report = qnn::train(params0, train, setup.train_config, score);
  return out;
}

ObjectiveFn make_pruning_objective(const PruningSetup& setup) {
  struct Cache {
    std::mutex mu;
    std::map<std::vector<std::uint8_t>, ObjectiveValue> by_mask;
  };
  auto cache = std::make_shared<Cache>();
  return [setup, cache](double tau) {
    const auto mask = pipeline::atp_mask(*setup.train, tau);
    {
      std::lock_guard lock(cache->mu);
      if (auto it = cache->by_mask.find(mask.keep); it != cache->by_mask.end()) return it->second;
    }
    const auto outcome = evaluate_threshold(setup, tau);
    const ObjectiveValue v{-outcome.report.test_accuracy, outcome.report.test_accuracy,
                           outcome.report.mean_entropy};
    std::lock_guard lock(cache->mu);
    cache->by_mask.emplace(mask.keep, v);
    return v;
  };
}

}  // namespace atpqnn::atp
