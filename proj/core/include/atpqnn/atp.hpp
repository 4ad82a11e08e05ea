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

/// \file atp.hpp
/// Threshold selection for adaptive threshold pruning: a memoized outer
/// objective f(tau) = -accuracy, finite-difference gradients, a projected
/// L-BFGS step on [0, tau_max], and a grid fallback for accuracy plateaus.
#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "atpqnn/data.hpp"
#include "atpqnn/encoders.hpp"
#include "atpqnn/qnn.hpp"

namespace atpqnn::atp {

struct ObjectiveValue {
  double value = 0.0;     // f(tau), minimized
  double accuracy = 0.0;  // -value for accuracy objectives
  double entropy = 0.0;   // NaN when the objective has no circuit behind it
};

using ObjectiveFn = std::function<ObjectiveValue(double tau)>;

/// Wraps a real-valued function as an objective (accuracy = -value).
ObjectiveFn analytic_objective(std::function<double(double)> f);

struct TraceEntry {
  double tau = 0.0;
  double value = 0.0;
  double accuracy = 0.0;
  double entropy = 0.0;
  double wall_seconds = 0.0;
};

/// Caches objective values per tau (taus within `tol` share an entry) and
/// records each distinct evaluation in call order. Concurrent lookups take a
/// shared lock; insertion is exclusive.
class MemoizedObjective {
 public:
  explicit MemoizedObjective(ObjectiveFn fn, double tol = 1e-12);

  ObjectiveValue operator()(double tau);

  std::vector<TraceEntry> trace() const;
  std::size_t evaluations() const;

 private:
  std::optional<std::size_t> find_locked(double tau) const;

  ObjectiveFn fn_;
  double tol_;
  mutable std::shared_mutex mu_;
  std::map<double, std::size_t> index_;
  std::vector<TraceEntry> trace_;
};

struct ThresholdOptions {
  double tau_max = 1.0;
  double grad_step = 0.02;
  double tolerance = 1e-3;
  std::size_t max_iters = 25;
  std::size_t history = 5;
  std::size_t grid_points = 11;
  double armijo_c = 1e-4;
  std::size_t max_backtracks = 20;

  /// Throws kInvalidArgument unless 0 < grad_step < tau_max and history >= 1.
  void validate() const;
};

struct ThresholdProblem {
  ThresholdOptions options;
  ObjectiveFn objective;
};

/// Central difference, or a one-sided difference when tau +/- h leaves
/// [0, tau_max].
double numeric_grad(MemoizedObjective& f, double tau, double h, double tau_max);

struct CurvaturePair {
  double s = 0.0;
  double y = 0.0;
};

struct LbfgsState {
  double tau = 0.0;
  double value = 0.0;
  double grad = 0.0;
  std::deque<CurvaturePair> history;  // oldest first
  std::size_t iteration = 0;
};

/// -H g by the two-loop recursion; H0 = gamma I with gamma = s'y / y'y of the
/// newest pair (1 with no history).
double lbfgs_direction(const LbfgsState& state, double grad);

struct StepResult {
  double tau = 0.0;
  bool stalled = false;
};

/// Projected backtracking (Armijo) step along the L-BFGS direction. On
/// success the state moves to the new point, its gradient is refreshed and
/// the curvature pair is stored when s'y > 1e-12. `stalled` is set when no
/// backtrack satisfies the sufficient-decrease test or the projected step is
/// zero; the state is then left untouched.
StepResult lbfgsb_step(LbfgsState& state, MemoizedObjective& f, const ThresholdOptions& options);

struct ThresholdResult {
  double tau_star = 0.0;
  double best_value = 0.0;
  double best_accuracy = 0.0;  // -best_value
  double entropy_at_star = 0.0;
  bool converged = false;
  bool used_fallback = false;
  std::size_t iterations = 0;
  std::vector<TraceEntry> evaluations;
};

/// L-BFGS-B from tau_max / 2 until the projected gradient drops below the
/// tolerance or max_iters steps. A zero gradient at the start or a stalled
/// line search switches to an equispaced grid followed by one local
/// refinement from the best grid point. Returns the best tau among all
/// evaluations.
ThresholdResult optimize_threshold(const ThresholdProblem& problem);

/// Everything needed to score a threshold on real data.
struct PruningSetup {
  std::shared_ptr<const data::PairDataset> train;
  std::shared_ptr<const data::PairDataset> test;
  /// Optional: score on this split instead of `test`.
  std::shared_ptr<const data::PairDataset> validation;
  qnn::TrainConfig train_config;
  bool compact = false;
};

struct PruningOutcome {
  encoders::PruneMask mask;
  qnn::TrainReport report;  // test_accuracy / mean_entropy on the scoring split
};

/// Builds the mask from the training-class averages at tau, prunes, trains a
/// fresh model (init and shuffle seeded by train_config.seed) and scores it.
PruningOutcome evaluate_threshold(const PruningSetup& setup, double tau);

/// f(tau) = -accuracy of evaluate_threshold. Results are shared between taus
/// that induce the same mask.
ObjectiveFn make_pruning_objective(const PruningSetup& setup);

}  // namespace atpqnn::atp
