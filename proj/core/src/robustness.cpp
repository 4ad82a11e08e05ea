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

#include "atpqnn/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "atpqnn/error.hpp"
#include "atpqnn/parallel.hpp"
#include "atpqnn/pipeline.hpp"
#include "atpqnn/random.hpp"

namespace atpqnn::robustness {
namespace {

constexpr std::uint64_t kAdversarialStream = 21;

}  // namespace

const char* to_string(NoiseScope scope) {
  switch (scope) {
    case NoiseScope::kAll: return "all";
    case NoiseScope::kEncoding: return "encoding";
    case NoiseScope::kModel: return "model";
  }
  return "?";
}

NoiseScope noise_scope_from_string(const std::string& name) {
  for (auto s : {NoiseScope::kAll, NoiseScope::kEncoding, NoiseScope::kModel}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorKind::kConfig, "unknown noise scope '" + name + "'");
}

void NoiseConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "noise p not in [0, 1]");
  if (trajectories == 0) throw Error(ErrorKind::kInvalidArgument, "need >= 1 trajectory");
}

double trajectory_expectation(const qnn::ModelParams& params,
                              const encoders::EncodedInput& encoded, const NoiseConfig& noise,
                              std::size_t sample_index) {
  noise.validate();
  const qsim::Circuit circuit = qnn::build_model_circuit(params, encoded);
  const qsim::Statevector psi0 = qnn::initial_state(encoded);
  const std::size_t r = qnn::readout_qubit(encoded);
  if (noise.p == 0.0) return qsim::expectation_z(qsim::run_circuit(psi0, circuit), r);

  qsim::TrajectoryNoise tn{noise.p, 0, circuit.ops.size()};
  const std::size_t prefix = qnn::prefix_length(encoded);
  if (noise.scope == NoiseScope::kEncoding) tn.last_op = prefix;
  if (noise.scope == NoiseScope::kModel) tn.first_op = prefix;

  double acc = 0.0;
  for (std::size_t t = 0; t < noise.trajectories; ++t) {
    Rng rng(derive_seed(noise.seed, {sample_index, t}));
    acc += qsim::expectation_z(qsim::run_circuit(psi0, circuit, tn, rng), r);
  }
  return acc / static_cast<double>(noise.trajectories);
}

double noisy_evaluate(const qnn::ModelParams& params, std::span<const qnn::Sample> test_set,
                      const NoiseConfig& noise) {
  if (test_set.empty()) throw Error(ErrorKind::kEmptyDataset, "evaluation set is empty");
  noise.validate();
  std::vector<int> correct(test_set.size());
  parallel_for(test_set.size(), noise.workers, [&](std::size_t i) {
    const double e = trajectory_expectation(params, test_set[i].input, noise, i);
    correct[i] = qnn::sign_label(e) == test_set[i].label ? 1 : 0;
  });
  return std::accumulate(correct.begin(), correct.end(), 0.0) /
         static_cast<double>(test_set.size());
}

std::vector<double> input_gradient(const qnn::ModelParams& params,
                                   const encoders::Encoder& encoder,
                                   const encoders::ImageGrid& image, int label) {
  if (encoder.kind == encoders::EncoderKind::kAmplitude) {
    throw Error(ErrorKind::kUnsupportedGradient,
                "input gradients through amplitude encoding are not supported");
  }
  const auto encoded = encoder.encode(image);
  const double slope = qnn::hinge_slope(qnn::predict(params, encoded).expectation, label);
  if (slope == 0.0) return std::vector<double>(image.size(), 0.0);
  auto angle = qnn::encoding_angle_gradient(params, encoded);
  for (double& g : angle) g *= slope;
  return encoder.pixel_gradient(image, angle);
}

encoders::ImageGrid fgsm_attack(const qnn::ModelParams& params, const encoders::Encoder& encoder,
                                const encoders::ImageGrid& image, int label,
                                const AttackConfig& attack) {
  if (!(attack.epsilon >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "epsilon must be >= 0");
  const auto grad = input_gradient(params, encoder, image, label);
  std::vector<double> out(image.pixels().begin(), image.pixels().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double sign = grad[i] > 0.0 ? 1.0 : (grad[i] < 0.0 ? -1.0 : 0.0);
    out[i] += attack.epsilon * sign;
    if (attack.clip) out[i] = std::clamp(out[i], 0.0, 1.0);
  }
  return attack.clip ? encoders::ImageGrid(image.side(), std::move(out))
                     : encoders::ImageGrid::unchecked(image.side(), std::move(out));
}

double attacked_accuracy(const qnn::ModelParams& params, const encoders::Encoder& encoder,
                         const data::PairDataset& set, const AttackConfig& attack,
                         std::size_t workers) {
  if (set.size() == 0) throw Error(ErrorKind::kEmptyDataset, "evaluation set is empty");
  std::vector<int> correct(set.size());
  parallel_for(set.size(), workers, [&](std::size_t i) {
    const auto adv = fgsm_attack(params, encoder, set.images[i], set.labels[i], attack);
    correct[i] = qnn::predict(params, encoder.encode(adv)).label == set.labels[i] ? 1 : 0;
  });
  return std::accumulate(correct.begin(), correct.end(), 0.0) / static_cast<double>(set.size());
}

qnn::TrainReport adversarial_train(const qnn::ModelParams& params0,
                                   const encoders::Encoder& encoder,
                                   const data::PairDataset& train_set,
                                   const AdvTrainConfig& config) {
  if (!(config.adversarial_fraction >= 0.0 && config.adversarial_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "adversarial_fraction not in [0, 1]");
  }
  const auto clean = pipeline::encode_samples(train_set, encoder);
  const qnn::BatchSource source = [&](std::size_t epoch, std::span<const std::size_t> idx,
                                      const qnn::ModelParams& current) {
    std::vector<qnn::Sample> batch;
    batch.reserve(idx.size());
    for (std::size_t i : idx) batch.push_back(clean[i]);
    const auto n_adv = static_cast<std::size_t>(
        std::llround(config.adversarial_fraction * static_cast<double>(idx.size())));
    if (n_adv == 0) return batch;

    std::vector<std::size_t> pos(idx.size());
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    Rng rng(derive_seed(config.base.seed, {kAdversarialStream, epoch, idx.front()}));
    rng.shuffle(pos.begin(), pos.end());
    pos.resize(n_adv);
    parallel_for(pos.size(), config.base.workers, [&](std::size_t k) {
      const std::size_t i = idx[pos[k]];
      const auto adv = fgsm_attack(current, encoder, train_set.images[i], train_set.labels[i],
                                   config.attack);
      batch[pos[k]].input = encoder.encode(adv);
    });
    return batch;
  };
  auto report = qnn::train_batches(params0, train_set.size(), source, config.base);
  report.train_accuracy = qnn::evaluate(report.final_params, clean, config.base.workers).accuracy;
  return report;
}

}  // namespace atpqnn::robustness
