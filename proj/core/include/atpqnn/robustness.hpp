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

/// \file robustness.hpp
/// Depolarizing noise by Pauli trajectories, FGSM input attacks and
/// adversarial training.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "atpqnn/data.hpp"
#include "atpqnn/encoders.hpp"
#include "atpqnn/qnn.hpp"

namespace atpqnn::robustness {

enum class NoiseScope : std::uint8_t { kAll, kEncoding, kModel };

const char* to_string(NoiseScope scope);
NoiseScope noise_scope_from_string(const std::string& name);

struct NoiseConfig {
  double p = 0.0;
  std::size_t trajectories = 200;
  std::uint64_t seed = 0;
  NoiseScope scope = NoiseScope::kAll;
  std::size_t workers = 1;

  void validate() const;
};

/// Mean readout <Z> over `noise.trajectories` stochastic runs. The stream of
/// trajectory t is seeded from (noise.seed, sample_index, t).
double trajectory_expectation(const qnn::ModelParams& params,
                              const encoders::EncodedInput& encoded, const NoiseConfig& noise,
                              std::size_t sample_index);

/// Accuracy with labels from the sign of the trajectory-mean <Z>.
double noisy_evaluate(const qnn::ModelParams& params, std::span<const qnn::Sample> test_set,
                      const NoiseConfig& noise);

struct AttackConfig {
  double epsilon = 0.3;
  bool clip = true;
};

struct AdvTrainConfig {
  qnn::TrainConfig base;
  AttackConfig attack;
  double adversarial_fraction = 0.5;
};

/// Hinge-loss gradient with respect to the raw input pixels, obtained by
/// parameter shift on the encoding rotations and pulled back through the
/// encoder. Pixels removed by a pruning mask get exactly 0.
std::vector<double> input_gradient(const qnn::ModelParams& params,
                                   const encoders::Encoder& encoder,
                                   const encoders::ImageGrid& image, int label);

/// x' = clip(x + epsilon * sign(grad)), with sign(0) = 0.
encoders::ImageGrid fgsm_attack(const qnn::ModelParams& params, const encoders::Encoder& encoder,
                                const encoders::ImageGrid& image, int label,
                                const AttackConfig& attack);

/// Accuracy on FGSM-perturbed copies of the set (white-box, noiseless model).
double attacked_accuracy(const qnn::ModelParams& params, const encoders::Encoder& encoder,
                         const data::PairDataset& set, const AttackConfig& attack,
                         std::size_t workers = 1);

/// Training where, in every batch, a seeded random `adversarial_fraction` of
/// the samples is replaced by its FGSM perturbation against the current
/// parameters.
qnn::TrainReport adversarial_train(const qnn::ModelParams& params0,
                                   const encoders::Encoder& encoder,
                                   const data::PairDataset& train_set,
                                   const AdvTrainConfig& config);

}  // namespace atpqnn::robustness
