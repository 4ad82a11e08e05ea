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

#include "atpqnn/qnn.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "atpqnn/error.hpp"
#include "atpqnn/parallel.hpp"
#include "atpqnn/random.hpp"

namespace atpqnn::qnn {
namespace {

constexpr double kShift = std::numbers::pi / 2;

// Stream tags for derive_seed.
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kInitStream = 2;

void check_sizes(const ModelParams& params, const encoders::EncodedInput& encoded) {
  if (params.n_data() != encoded.n_data) {
    throw Error(ErrorKind::kShapeMismatch,
                "model expects " + std::to_string(params.n_data()) + " data qubits, input has " +
                    std::to_string(encoded.n_data));
  }
}

double expectation_of(const qsim::Circuit& circuit, const encoders::EncodedInput& encoded) {
  return qsim::expectation_z(qsim::run_circuit(initial_state(encoded), circuit),
                             readout_qubit(encoded));
}

}  // namespace

ModelParams::ModelParams(std::size_t n_data) : n_data_(n_data), theta_(count_for(n_data), 0.0) {}

ModelParams::ModelParams(std::size_t n_data, std::vector<double> theta)
    : n_data_(n_data), theta_(std::move(theta)) {
  if (theta_.size() != count_for(n_data)) {
    throw Error(ErrorKind::kShapeMismatch, "expected " + std::to_string(count_for(n_data)) +
                                               " parameters, got " +
                                               std::to_string(theta_.size()));
  }
  for (double t : theta_) {
    if (!std::isfinite(t)) throw Error(ErrorKind::kInvalidArgument, "non-finite parameter");
  }
}

ModelParams ModelParams::random(std::size_t n_data, std::uint64_t seed, double scale) {
  Rng rng(derive_seed(seed, {kInitStream}));
  std::vector<double> theta(count_for(n_data));
  for (double& t : theta) t = rng.uniform(-scale, scale);
  return ModelParams(n_data, std::move(theta));
}

std::size_t prefix_length(const encoders::EncodedInput& encoded) {
  return encoded.kind == encoders::EncodedKind::kAmplitudeState ? 0 : encoded.prefix.ops.size();
}

qsim::Circuit build_model_circuit(const ModelParams& params,
                                  const encoders::EncodedInput& encoded) {
  check_sizes(params, encoded);
  const std::size_t nd = encoded.n_data;
  const std::size_t r = nd;
  qsim::Circuit c;
  c.n_qubits = nd + 1;
  c.ops.reserve(prefix_length(encoded) + 3 + params.size());
  if (encoded.kind != encoders::EncodedKind::kAmplitudeState) {
    c.ops.insert(c.ops.end(), encoded.prefix.ops.begin(), encoded.prefix.ops.end());
  }
  c.ops.push_back(qsim::GateOp::x(r));
  c.ops.push_back(qsim::GateOp::h(r));
  for (std::size_t l = 0; l < kLayers; ++l) {
    for (std::size_t d = 0; d < nd; ++d) {
      c.ops.push_back(qsim::GateOp::xx(d, r, params.xx(l, d)));
      c.ops.push_back(qsim::GateOp::zz(d, r, params.zz(l, d)));
    }
  }
  c.ops.push_back(qsim::GateOp::h(r));
  return c;
}

qsim::Statevector initial_state(const encoders::EncodedInput& encoded) {
  if (encoded.kind == encoders::EncodedKind::kAmplitudeState) {
    return encoded.state->with_ancilla();
  }
  return qsim::Statevector(encoded.n_data + 1);
}

qsim::Statevector final_state(const ModelParams& params, const encoders::EncodedInput& encoded) {
  return qsim::run_circuit(initial_state(encoded), build_model_circuit(params, encoded));
}

Prediction predict(const ModelParams& params, const encoders::EncodedInput& encoded) {
  const double e = qsim::expectation_z(final_state(params, encoded), readout_qubit(encoded));
  return {e, sign_label(e)};
}

double hinge_loss(double expectation, int label) {
  return std::max(0.0, 1.0 - label * expectation);
}

double hinge_slope(double expectation, int label) {
  return 1.0 - label * expectation > 0.0 ? -static_cast<double>(label) : 0.0;
}

std::vector<double> expectation_gradient(const ModelParams& params,
                                         const encoders::EncodedInput& encoded) {
  check_sizes(params, encoded);
  const std::size_t offset = prefix_length(encoded) + 2;
  qsim::Circuit circuit = build_model_circuit(params, encoded);
  std::vector<double> grad(params.size());
  for (std::size_t j = 0; j < params.size(); ++j) {
    auto& op = circuit.ops[offset + j];
    const double theta = op.theta;
    op.theta = theta + kShift;
    const double plus = expectation_of(circuit, encoded);
    op.theta = theta - kShift;
    const double minus = expectation_of(circuit, encoded);
    op.theta = theta;
    grad[j] = (plus - minus) / 2;
  }
  return grad;
}

std::vector<double> encoding_angle_gradient(const ModelParams& params,
                                            const encoders::EncodedInput& encoded) {
  if (encoded.kind == encoders::EncodedKind::kAmplitudeState) {
    throw Error(ErrorKind::kUnsupportedGradient,
                "amplitude-encoded inputs have no encoding angles");
  }
  qsim::Circuit circuit = build_model_circuit(params, encoded);
  std::vector<double> grad(prefix_length(encoded));
  for (std::size_t k = 0; k < grad.size(); ++k) {
    auto& op = circuit.ops[k];
    const double theta = op.theta;
    op.theta = theta + kShift;
    const double plus = expectation_of(circuit, encoded);
    op.theta = theta - kShift;
    const double minus = expectation_of(circuit, encoded);
    op.theta = theta;
    grad[k] = (plus - minus) / 2;
  }
  return grad;
}

std::vector<double> param_gradient(const ModelParams& params, const encoders::EncodedInput& encoded,
                                   int label) {
  const double e = predict(params, encoded).expectation;
  const double slope = hinge_slope(e, label);
  if (slope == 0.0) return std::vector<double>(params.size(), 0.0);
  auto grad = expectation_gradient(params, encoded);
  for (double& g : grad) g *= slope;
  return grad;
}

AdjointGradients adjoint_gradients(const ModelParams& params,
                                   const encoders::EncodedInput& encoded) {
  const qsim::Circuit circuit = build_model_circuit(params, encoded);
  const std::size_t prefix = prefix_length(encoded);
  const std::size_t offset = prefix + 2;
  const std::size_t r = readout_qubit(encoded);

  qsim::Statevector psi = qsim::run_circuit(initial_state(encoded), circuit);
  AdjointGradients out;
  out.expectation = qsim::expectation_z(psi, r);
  out.params.assign(params.size(), 0.0);
  out.encoding.assign(prefix, 0.0);

  qsim::Statevector lambda = psi;
  qsim::apply_pauli(lambda, qsim::Pauli::kZ, r);
  // d<Z>/dtheta_k = Im <lambda_k| G_k |psi_k>, both taken just after gate k.
  for (std::size_t k = circuit.ops.size(); k-- > 0;) {
    const auto& op = circuit.ops[k];
    if (qsim::is_parameterized(op.kind)) {
      const double g = qsim::generator_element(lambda, op, psi).imag();
      if (k < prefix) {
        out.encoding[k] = g;
      } else if (k >= offset && k - offset < out.params.size()) {
        out.params[k - offset] = g;
      }
    }
    if (k == 0) break;
    qsim::apply_gate_inverse(psi, op);
    qsim::apply_gate_inverse(lambda, op);
  }
  return out;
}

TrainReport train_batches(const ModelParams& params0, std::size_t n_train,
                          const BatchSource& source, const TrainConfig& config) {
  if (n_train == 0) throw Error(ErrorKind::kEmptyDataset, "training set is empty");
  if (config.epochs == 0 || config.batch_size == 0) {
    throw Error(ErrorKind::kInvalidArgument, "epochs and batch_size must be >= 1");
  }
  if (!(config.learning_rate >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "learning rate must be nonnegative");
  }
  ModelParams params = params0;
  TrainReport report;
  std::vector<std::size_t> order(n_train);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, {kShuffleStream, epoch}));
    rng.shuffle(order.begin(), order.end());

    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < n_train; begin += config.batch_size) {
      const std::size_t end = std::min(n_train, begin + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      const std::vector<Sample> batch = source(epoch, idx, params);

      std::vector<double> losses(batch.size());
      std::vector<std::vector<double>> grads(batch.size());
      parallel_for(batch.size(), config.workers, [&](std::size_t i) {
        const auto adj = adjoint_gradients(params, batch[i].input);
        losses[i] = hinge_loss(adj.expectation, batch[i].label);
        const double slope = hinge_slope(adj.expectation, batch[i].label);
        grads[i] = adj.params;
        for (double& g : grads[i]) g *= slope;
      });

      std::vector<double> mean(params.size(), 0.0);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        epoch_loss += losses[i];
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += grads[i][j];
      }
      const double scale = config.learning_rate / static_cast<double>(batch.size());
      auto& theta = params.mutable_values();
      for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= scale * mean[j];
    }
    report.loss_curve.push_back(epoch_loss / static_cast<double>(n_train));
  }
  report.final_params = std::move(params);
  return report;
}

TrainReport train(const ModelParams& params0, std::span<const Sample> train_set,
                  const TrainConfig& config, std::span<const Sample> test_set) {
  const BatchSource source = [&](std::size_t, std::span<const std::size_t> idx,
                                 const ModelParams&) {
    std::vector<Sample> batch;
    batch.reserve(idx.size());
    for (std::size_t i : idx) batch.push_back(train_set[i]);
    return batch;
  };
  TrainReport report = train_batches(params0, train_set.size(), source, config);
  report.train_accuracy = evaluate(report.final_params, train_set, config.workers).accuracy;
  if (!test_set.empty()) {
    const auto ev = evaluate(report.final_params, test_set, config.workers);
    report.test_accuracy = ev.accuracy;
    report.mean_entropy = ev.mean_entropy;
  }
  return report;
}

Evaluation evaluate(const ModelParams& params, std::span<const Sample> test_set,
                    std::size_t workers) {
  if (test_set.empty()) throw Error(ErrorKind::kEmptyDataset, "evaluation set is empty");
  std::vector<int> correct(test_set.size());
  std::vector<double> entropy(test_set.size());
  parallel_for(test_set.size(), workers, [&](std::size_t i) {
    const auto& s = test_set[i];
    const auto psi = final_state(params, s.input);
    const std::size_t r = readout_qubit(s.input);
    correct[i] = sign_label(qsim::expectation_z(psi, r)) == s.label ? 1 : 0;
    entropy[i] = qsim::von_neumann_entropy(qsim::reduced_density(psi, r));
  });
  Evaluation ev;
  const auto n = static_cast<double>(test_set.size());
  ev.accuracy = std::accumulate(correct.begin(), correct.end(), 0.0) / n;
  ev.mean_entropy = std::accumulate(entropy.begin(), entropy.end(), 0.0) / n;
  return ev;
}

}  // namespace atpqnn::qnn
