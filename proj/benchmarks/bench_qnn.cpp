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

#include <vector>

#include "atpqnn/encoders.hpp"
#include "atpqnn/qnn.hpp"

namespace {

using namespace atpqnn;

encoders::EncodedInput image_input(std::size_t side) {
  std::vector<double> px(side * side);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<double>(i % 7) / 7.0;
  return encoders::angle_encode(encoders::ImageGrid(side, px));
}

void BM_Predict(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto enc = image_input(side);
  const auto params = qnn::ModelParams::random(side * side, 1);
  for (auto _ : state) benchmark::DoNotOptimize(qnn::predict(params, enc));
}
BENCHMARK(BM_Predict)->DenseRange(2, 4, 1);

void BM_AdjointGradient(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto enc = image_input(side);
  const auto params = qnn::ModelParams::random(side * side, 1);
  for (auto _ : state) benchmark::DoNotOptimize(qnn::adjoint_gradients(params, enc));
}
BENCHMARK(BM_AdjointGradient)->DenseRange(2, 4, 1);

void BM_ParameterShiftGradient(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto enc = image_input(side);
  const auto params = qnn::ModelParams::random(side * side, 1);
  for (auto _ : state) benchmark::DoNotOptimize(qnn::expectation_gradient(params, enc));
}
BENCHMARK(BM_ParameterShiftGradient)->DenseRange(2, 3, 1);

}  // namespace
