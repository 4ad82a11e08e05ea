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

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "atpqnn/error.hpp"
#include "atpqnn/qsim.hpp"
#include "atpqnn/random.hpp"

namespace atpqnn::testing {

/// Kind of the atpqnn::Error thrown by `fn`, or nullopt when nothing is thrown.
inline std::optional<ErrorKind> error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline qsim::Statevector random_state(std::size_t n, Rng& rng) {
  std::vector<qsim::Complex> amps(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& a : amps) {
    a = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  return qsim::Statevector::from_amplitudes(n, std::move(amps));
}

inline qsim::GateOp random_gate(std::size_t n, Rng& rng) {
  const auto kind = static_cast<qsim::GateKind>(rng.below(n >= 2 ? 7 : 5));
  const double theta = rng.uniform(-2 * M_PI, 2 * M_PI);
  const std::size_t a = rng.below(n);
  std::size_t b = a;
  if (qsim::is_two_qubit(kind)) {
    b = rng.below(n - 1);
    if (b >= a) ++b;
  }
  return {kind, {a, b}, qsim::is_parameterized(kind) ? theta : 0.0};
}

inline double max_diff(const std::vector<qsim::Complex>& x, const std::vector<qsim::Complex>& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace atpqnn::testing
