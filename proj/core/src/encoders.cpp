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

#include "atpqnn/encoders.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "atpqnn/error.hpp"

namespace atpqnn::encoders {
namespace {

constexpr double kPi = std::numbers::pi;

void require_same_side(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::kShapeMismatch, std::string(what) + ": side " + std::to_string(a) +
                                               " does not match side " + std::to_string(b));
  }
}

EncodedInput make_prefix(EncodedKind kind, std::size_t n_data) {
  EncodedInput e;
  e.kind = kind;
  e.n_data = n_data;
  e.prefix.n_qubits = n_data;
  return e;
}

}  // namespace

ImageGrid::ImageGrid(std::size_t side, std::vector<double> pixels)
    : side_(side), pixels_(std::move(pixels)) {
  if (side_ == 0 || pixels_.size() != side_ * side_) {
    throw Error(ErrorKind::kInvalidArgument,
                "image needs side^2 pixels (side " + std::to_string(side_) + ", got " +
                    std::to_string(pixels_.size()) + ")");
  }
  for (double v : pixels_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "pixel value outside [0, 1]");
    }
  }
}

ImageGrid ImageGrid::zeros(std::size_t side) {
  return ImageGrid(side, std::vector<double>(side * side, 0.0));
}

ImageGrid ImageGrid::unchecked(std::size_t side, std::vector<double> pixels) {
  ImageGrid g;
  if (side == 0 || pixels.size() != side * side) {
    throw Error(ErrorKind::kInvalidArgument, "image needs side^2 pixels");
  }
  for (double v : pixels) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "non-finite pixel");
  }
  g.side_ = side;
  g.pixels_ = std::move(pixels);
  return g;
}

std::size_t PruneMask::count_kept() const {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), std::uint8_t{1}));
}

PruneMask PruneMask::all(std::size_t side, bool keep_value) {
  return PruneMask{side, std::vector<std::uint8_t>(side * side, keep_value ? 1 : 0)};
}

ImageGrid class_average(std::span<const ImageGrid> images, std::span<const int> labels,
                        int cls) {
  if (images.size() != labels.size()) {
    throw Error(ErrorKind::kShapeMismatch, "images and labels differ in length");
  }
  std::vector<double> sum;
  std::size_t side = 0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < images.size(); ++n) {
    if (labels[n] != cls) continue;
    if (count == 0) {
      side = images[n].side();
      sum.assign(images[n].size(), 0.0);
    }
    require_same_side(images[n].side(), side, "class_average");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += images[n][i];
    ++count;
  }
  if (count == 0) {
    throw Error(ErrorKind::kEmptyClass, "no samples of class " + std::to_string(cls));
  }
  for (double& v : sum) v = std::clamp(v / static_cast<double>(count), 0.0, 1.0);
  return ImageGrid(side, std::move(sum));
}

PruneMask build_mask(const ImageGrid& avg0, const ImageGrid& avg1, double tau) {
  if (!(tau >= 0.0)) {
    throw Error(ErrorKind::kInvalidThreshold, "threshold must be >= 0");
  }
  require_same_side(avg0.side(), avg1.side(), "build_mask");
  PruneMask mask{avg0.side(), std::vector<std::uint8_t>(avg0.size(), 1)};
  for (std::size_t i = 0; i < avg0.size(); ++i) {
    if (avg0[i] < tau && avg1[i] < tau) mask.keep[i] = 0;
  }
  return mask;
}

ImageGrid apply_mask(const ImageGrid& image, const PruneMask& mask) {
  require_same_side(image.side(), mask.side, "apply_mask");
  std::vector<double> out(image.pixels().begin(), image.pixels().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask.kept(i)) out[i] = 0.0;
  }
  return ImageGrid::unchecked(image.side(), std::move(out));
}

EncodedInput angle_encode(const ImageGrid& image) {
  return angle_encode_values(image.pixels());
}

EncodedInput angle_encode_values(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "nothing to encode");
  EncodedInput e = make_prefix(EncodedKind::kAnglePrefix, values.size());
  e.prefix.ops.reserve(values.size());
  for (std::size_t q = 0; q < values.size(); ++q) {
    e.prefix.ops.push_back(qsim::GateOp::rx(q, kPi * values[q]));
  }
  return e;
}

EncodedInput angle_encode_kept(const ImageGrid& image, const PruneMask& mask) {
  require_same_side(image.side(), mask.side, "angle_encode_kept");
  std::vector<double> kept;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (mask.kept(i)) kept.push_back(image[i]);
  }
  // A fully pruned image still needs one (idle) data qubit.
  if (kept.empty()) kept.push_back(0.0);
  return angle_encode_values(kept);
}

std::size_t amplitude_qubits(std::size_t n_values) {
  std::size_t n = 1;
  while ((std::size_t{1} << n) < n_values) ++n;
  return n;
}

EncodedInput amplitude_encode(std::span<const double> values, std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > 30 || values.size() > (std::size_t{1} << n_qubits)) {
    throw Error(ErrorKind::kInvalidArgument,
                std::to_string(values.size()) + " values do not fit in " +
                    std::to_string(n_qubits) + " qubits");
  }
  double norm2 = 0.0;
  for (double v : values) norm2 += v * v;
  if (norm2 == 0.0) {
    throw Error(ErrorKind::kUndefinedNormalization, "cannot amplitude-encode a zero vector");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<qsim::Complex> amps(std::size_t{1} << n_qubits);
  for (std::size_t i = 0; i < values.size(); ++i) amps[i] = values[i] * inv;
  EncodedInput e;
  e.kind = EncodedKind::kAmplitudeState;
  e.n_data = n_qubits;
  e.prefix.n_qubits = n_qubits;
  e.state = qsim::Statevector::from_amplitudes(n_qubits, std::move(amps));
  return e;
}

EncodedInput sqe_encode(const ImageGrid& image) {
  EncodedInput e = make_prefix(EncodedKind::kSqePrefix, 1);
  const auto px = image.pixels();
  for (std::size_t t = 0; t < px.size(); ++t) {
    const double angle = kPi * px[t];
    e.prefix.ops.push_back(t % 3 == 1 ? qsim::GateOp::ry(0, angle) : qsim::GateOp::rz(0, angle));
  }
  return e;
}

PcaModel pca_fit(std::span<const ImageGrid> train_images, std::size_t k) {
  if (train_images.size() < 2) {
    throw Error(ErrorKind::kEmptyDataset, "PCA needs at least two training images");
  }
  const std::size_t side = train_images.front().side();
  const std::size_t dim = side * side;
  if (k == 0 || k > dim) {
    throw Error(ErrorKind::kInvalidRank,
                "PCA rank " + std::to_string(k) + " not in [1, " + std::to_string(dim) + "]");
  }
  const auto n = static_cast<Eigen::Index>(train_images.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(dim));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& img = train_images[static_cast<std::size_t>(r)];
    require_same_side(img.side(), side, "pca_fit");
    for (std::size_t c = 0; c < dim; ++c) x(r, static_cast<Eigen::Index>(c)) = img[c];
  }
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mu;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);

  PcaModel model;
  model.side = side;
  model.k = k;
  model.mean.assign(mu.data(), mu.data() + dim);
  const double top = std::max(solver.eigenvalues().maxCoeff(), 0.0);
  const double cutoff = 1e-12 * std::max(1.0, top);
  for (std::size_t c = 0; c < k; ++c) {
    // Eigen sorts ascending.
    const auto col = static_cast<Eigen::Index>(dim - 1 - c);
    const double lambda = solver.eigenvalues()(col);
    std::vector<double> v(dim, 0.0);
    if (lambda > cutoff) {
      Eigen::VectorXd e = solver.eigenvectors().col(col);
      Eigen::Index arg = 0;
      for (Eigen::Index i = 1; i < e.size(); ++i) {
        if (std::abs(e(i)) > std::abs(e(arg)) + 1e-12) arg = i;
      }
      if (e(arg) < 0) e = -e;
      v.assign(e.data(), e.data() + dim);
    }
    model.components.push_back(std::move(v));
    model.eigenvalues.push_back(lambda > cutoff ? lambda : 0.0);
  }
  model.half_range.assign(k, 0.0);
  for (const auto& img : train_images) {
    const auto p = pca_project(model, img);
    for (std::size_t c = 0; c < k; ++c) {
      model.half_range[c] = std::max(model.half_range[c], std::abs(p[c]));
    }
  }
  return model;
}

std::vector<double> pca_project(const PcaModel& model, const ImageGrid& image) {
  require_same_side(image.side(), model.side, "pca_project");
  std::vector<double> out(model.k, 0.0);
  for (std::size_t c = 0; c < model.k; ++c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < image.size(); ++i) {
      acc += model.components[c][i] * (image[i] - model.mean[i]);
    }
    out[c] = acc;
  }
  return out;
}

std::vector<double> pca_transform(const PcaModel& model, const ImageGrid& image) {
  auto p = pca_project(model, image);
  for (std::size_t c = 0; c < model.k; ++c) {
    const double m = model.half_range[c];
    p[c] = m > 0.0 ? std::clamp((p[c] + m) / (2.0 * m), 0.0, 1.0) : 0.0;
  }
  return p;
}

const char* to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kAngle: return "angle";
    case EncoderKind::kAmplitude: return "amplitude";
    case EncoderKind::kAtp: return "atp";
    case EncoderKind::kPca: return "pca";
    case EncoderKind::kSqe: return "sqe";
  }
  return "?";
}

EncoderKind encoder_kind_from_string(const std::string& name) {
  for (auto k : {EncoderKind::kAngle, EncoderKind::kAmplitude, EncoderKind::kAtp,
                 EncoderKind::kPca, EncoderKind::kSqe}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::kConfig, "unknown encoder '" + name + "'");
}

Encoder Encoder::atp(PruneMask mask, bool compact) {
  Encoder e{EncoderKind::kAtp, mask.side, {}, compact, {}};
  e.mask = std::move(mask);
  return e;
}

Encoder Encoder::pca_angle(PcaModel model) {
  Encoder e{EncoderKind::kPca, model.side, {}, false, {}};
  e.pca = std::move(model);
  return e;
}

std::size_t Encoder::data_qubits() const {
  switch (kind) {
    case EncoderKind::kAngle: return side * side;
    case EncoderKind::kAmplitude: return amplitude_qubits(side * side);
    case EncoderKind::kAtp:
      return compact ? std::max<std::size_t>(1, mask->count_kept()) : side * side;
    case EncoderKind::kPca: return pca->k;
    case EncoderKind::kSqe: return 1;
  }
  return 0;
}

ImageGrid Encoder::preprocess(const ImageGrid& image) const {
  require_same_side(image.side(), side, "encoder");
  return kind == EncoderKind::kAtp ? apply_mask(image, *mask) : image;
}

EncodedInput Encoder::encode(const ImageGrid& image) const {
  require_same_side(image.side(), side, "encoder");
  switch (kind) {
    case EncoderKind::kAngle: return angle_encode(image);
    case EncoderKind::kAmplitude:
      return amplitude_encode(image.pixels(), amplitude_qubits(image.size()));
    case EncoderKind::kAtp:
      return compact ? angle_encode_kept(image, *mask) : angle_encode(apply_mask(image, *mask));
    case EncoderKind::kPca: {
      const auto u = pca_transform(*pca, image);
      return angle_encode_values(u);
    }
    case EncoderKind::kSqe: return sqe_encode(image);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown encoder kind");
}

std::vector<double> Encoder::pixel_gradient(const ImageGrid& image,
                                            std::span<const double> angle_grads) const {
  require_same_side(image.side(), side, "encoder");
  std::vector<double> grad(image.size(), 0.0);
  switch (kind) {
    case EncoderKind::kAmplitude:
      throw Error(ErrorKind::kUnsupportedGradient,
                  "pixel gradients through amplitude encoding are not supported");
    case EncoderKind::kAngle:
    case EncoderKind::kSqe:
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = kPi * angle_grads[i];
      break;
    case EncoderKind::kAtp:
      if (compact) {
        std::size_t q = 0;
        for (std::size_t i = 0; i < grad.size(); ++i) {
          if (mask->kept(i)) grad[i] = kPi * angle_grads[q++];
        }
      } else {
        for (std::size_t i = 0; i < grad.size(); ++i) {
          grad[i] = mask->kept(i) ? kPi * angle_grads[i] : 0.0;
        }
      }
      break;
    case EncoderKind::kPca: {
      const auto p = pca_project(*pca, image);
      for (std::size_t c = 0; c < pca->k; ++c) {
        const double m = pca->half_range[c];
        if (m <= 0.0) continue;
        const double u = (p[c] + m) / (2.0 * m);
        if (u <= 0.0 || u >= 1.0) continue;  // clamped: locally constant
        const double scale = kPi * angle_grads[c] / (2.0 * m);
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += scale * pca->components[c][i];
      }
      break;
    }
  }
  return grad;
}

}  // namespace atpqnn::encoders
