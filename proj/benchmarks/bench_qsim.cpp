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

#include <benchmark/benchmark.h>

#include "atpqnn/qsim.hpp"
#include "atpqnn/random.hpp"

namespace {

using namespace atpqnn;
using namespace atpqnn::qsim;

void BM_ApplyRx(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Statevector psi(n);
  const auto g = GateOp::rx(n / 2, 0.3);
  for (auto _ : state) {
    apply_gate(psi, g);
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(psi.dim()));
}
BENCHMARK(BM_ApplyRx)->DenseRange(4, 16, 4);

void BM_ApplyZz(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Statevector psi(n);
  const auto g = GateOp::zz(0, n - 1, 0.7);
  for (auto _ : state) {
    apply_gate(psi, g);
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(psi.dim()));
}
BENCHMARK(BM_ApplyZz)->DenseRange(4, 16, 4);

void BM_NoisyTrajectory(benchmark::State& state) {
  const std::size_t n = 10;
  Circuit c{n, {}};
  for (std::size_t layer = 0; layer < 3; ++layer) {
    for (std::size_t d = 0; d + 1 < n; ++d) {
      c.ops.push_back(GateOp::xx(d, n - 1, 0.2));
      c.ops.push_back(GateOp::zz(d, n - 1, 0.4));
    }
  }
  Rng rng(7);
  const TrajectoryNoise noise{0.05, 0, c.ops.size()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_circuit(Statevector(n), c, noise, rng));
  }
}
BENCHMARK(BM_NoisyTrajectory);

}  // namespace

BENCHMARK_MAIN();
