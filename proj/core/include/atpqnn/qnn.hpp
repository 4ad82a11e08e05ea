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

/// \file qnn.hpp
/// Three-layer variational binary classifier with a single readout qubit.
///
/// Register layout: data qubits 0..n_data-1, readout qubit n_data. The model
/// circuit is
///   encoding prefix; X(r); H(r);
///   for each of 3 layers, for each data qubit d: XX(d, r), ZZ(d, r);
///   H(r)
/// and the class is the sign of <Z> on the readout (0 maps to +1).
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "atpqnn/encoders.hpp"
#include "atpqnn/qsim.hpp"

namespace atpqnn::qnn {

inline constexpr std::size_t kLayers = 3;

/// Flat angle vector ordered as in the circuit: layer-major, then data qubit,
/// then (xx, zz).
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(std::size_t n_data);
  ModelParams(std::size_t n_data, std::vector<double> theta);

  /// Uniform in [-scale, scale].
  static ModelParams random(std::size_t n_data, std::uint64_t seed, double scale = 0.1);

  static std::size_t count_for(std::size_t n_data) { return 2 * kLayers * n_data; }

  std::size_t n_data() const { return n_data_; }
  std::size_t size() const { return theta_.size(); }

  static std::size_t xx_index(std::size_t n_data, std::size_t layer, std::size_t d) {
    return 2 * (layer * n_data + d);
  }
  static std::size_t zz_index(std::size_t n_data, std::size_t layer, std::size_t d) {
    return xx_index(n_data, layer, d) + 1;
  }
  double xx(std::size_t layer, std::size_t d) const { return theta_[xx_index(n_data_, layer, d)]; }
  double zz(std::size_t layer, std::size_t d) const { return theta_[zz_index(n_data_, layer, d)]; }

  std::span<const double> values() const { return theta_; }
  std::vector<double>& mutable_values() { return theta_; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::size_t n_data_ = 0;
  std::vector<double> theta_;
};

struct Sample {
  encoders::EncodedInput input;
  int label = 1;  // -1 or +1
};

/// Full model circuit over n_data + 1 qubits. For amplitude-encoded inputs the
/// prefix is empty and the data state is supplied by initial_state().
qsim::Circuit build_model_circuit(const ModelParams& params, const encoders::EncodedInput& encoded);

/// Number of ops preceding the readout initialization (the encoding prefix).
std::size_t prefix_length(const encoders::EncodedInput& encoded);

qsim::Statevector initial_state(const encoders::EncodedInput& encoded);

inline std::size_t readout_qubit(const encoders::EncodedInput& encoded) { return encoded.n_data; }

/// Final noiseless state of the model circuit.
qsim::Statevector final_state(const ModelParams& params, const encoders::EncodedInput& encoded);

struct Prediction {
  double expectation = 0.0;
  int label = 1;
};

inline int sign_label(double expectation) { return expectation >= 0.0 ? 1 : -1; }

Prediction predict(const ModelParams& params, const encoders::EncodedInput& encoded);

/// max(0, 1 - label * expectation).
double hinge_loss(double expectation, int label);

/// dL/d<Z> of the hinge loss; 0 at and beyond the kink.
double hinge_slope(double expectation, int label);

/// d<Z>/dtheta for every model parameter by the parameter-shift rule.
std::vector<double> expectation_gradient(const ModelParams& params,
                                         const encoders::EncodedInput& encoded);

/// d<Z>/d(angle) for every encoding prefix gate by the parameter-shift rule.
/// Throws kUnsupportedGradient for amplitude-encoded inputs.
std::vector<double> encoding_angle_gradient(const ModelParams& params,
                                            const encoders::EncodedInput& encoded);

/// Hinge-loss gradient w.r.t. the model parameters (parameter shift).
std::vector<double> param_gradient(const ModelParams& params, const encoders::EncodedInput& encoded,
                                   int label);

/// One forward and one backward sweep giving <Z> and its exact derivatives
/// with respect to every model parameter and every encoding angle. Agrees with
/// the parameter-shift routes to rounding error.
struct AdjointGradients {
  double expectation = 0.0;
  std::vector<double> params;
  std::vector<double> encoding;
};
AdjointGradients adjoint_gradients(const ModelParams& params,
                                   const encoders::EncodedInput& encoded);

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t batch_size = 10;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct TrainReport {
  std::vector<double> loss_curve;
  ModelParams final_params;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double mean_entropy = 0.0;
};

struct Evaluation {
  double accuracy = 0.0;
  double mean_entropy = 0.0;
};

/// Supplies the samples of one mini-batch. `indices` are positions in the
/// training set after the epoch's shuffle; `current` is the model before the
/// batch's update.
using BatchSource = std::function<std::vector<Sample>(
    std::size_t epoch, std::span<const std::size_t> indices, const ModelParams& current)>;

/// Mini-batch SGD on the hinge loss. Loss-curve entries are the mean loss
/// over the epoch's samples, each measured before its batch's update.
TrainReport train_batches(const ModelParams& params0, std::size_t n_train,
                          const BatchSource& source, const TrainConfig& config);

/// Plain training; fills train_accuracy, and test_accuracy / mean_entropy
/// when a test set is supplied.
TrainReport train(const ModelParams& params0, std::span<const Sample> train_set,
                  const TrainConfig& config, std::span<const Sample> test_set = {});

/// Sign accuracy and mean readout entanglement entropy (bits).
Evaluation evaluate(const ModelParams& params, std::span<const Sample> test_set,
                    std::size_t workers = 1);

}  // namespace atpqnn::qnn
