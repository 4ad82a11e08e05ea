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

/// \file encoders.hpp
/// Classical-to-quantum encodings: threshold pruning masks, angle, amplitude,
/// single-qubit Z-Y-Z and PCA-then-angle encodings.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atpqnn/qsim.hpp"

namespace atpqnn::encoders {

/// Square grayscale image, row-major, pixels in [0, 1].
class ImageGrid {
 public:
  ImageGrid() = default;
  /// Throws kInvalidArgument when the size is not side^2 or a pixel is
  /// outside [0, 1].
  ImageGrid(std::size_t side, std::vector<double> pixels);

  static ImageGrid zeros(std::size_t side);
  /// Skips the [0, 1] range check (finite values only). Used for unclipped
  /// adversarial inputs.
  static ImageGrid unchecked(std::size_t side, std::vector<double> pixels);

  std::size_t side() const { return side_; }
  std::size_t size() const { return pixels_.size(); }
  double at(std::size_t row, std::size_t col) const { return pixels_[row * side_ + col]; }
  double operator[](std::size_t i) const { return pixels_[i]; }
  std::span<const double> pixels() const { return pixels_; }

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  std::size_t side_ = 0;
  std::vector<double> pixels_;
};

struct PruneMask {
  std::size_t side = 0;
  std::vector<std::uint8_t> keep;  // 1 = keep, 0 = pruned; row-major

  bool kept(std::size_t i) const { return keep[i] != 0; }
  std::size_t count_kept() const;
  static PruneMask all(std::size_t side, bool keep_value);

  friend bool operator==(const PruneMask&, const PruneMask&) = default;
};

/// Element-wise mean of the images whose label equals `cls`.
ImageGrid class_average(std::span<const ImageGrid> images, std::span<const int> labels, int cls);

/// keep(i,j) = !(avg0(i,j) < tau && avg1(i,j) < tau). Strict inequalities, so
/// tau = 0 keeps every nonnegative pixel.
PruneMask build_mask(const ImageGrid& avg0, const ImageGrid& avg1, double tau);

ImageGrid apply_mask(const ImageGrid& image, const PruneMask& mask);

enum class EncodedKind : std::uint8_t { kAnglePrefix, kAmplitudeState, kSqePrefix };

/// Either a gate prefix acting on the data register or a prepared data state.
struct EncodedInput {
  EncodedKind kind = EncodedKind::kAnglePrefix;
  std::size_t n_data = 0;
  qsim::Circuit prefix;                  // prefix kinds; prefix.n_qubits == n_data
  std::optional<qsim::Statevector> state;  // amplitude kind
};

/// RX(pi * x(i,j)) on data qubit i*s + j. Zero pixels still get an RX(0).
EncodedInput angle_encode(const ImageGrid& image);
/// Angle encoding of an arbitrary vector of values in [0, 1], one qubit each.
EncodedInput angle_encode_values(std::span<const double> values);
/// Compacted angle encoding: only positions kept by `mask` receive a qubit,
/// in row-major order.
EncodedInput angle_encode_kept(const ImageGrid& image, const PruneMask& mask);

/// Zero-pads to 2^n_qubits and normalizes. Throws kUndefinedNormalization for
/// an all-zero vector and kInvalidArgument when the vector does not fit.
EncodedInput amplitude_encode(std::span<const double> values, std::size_t n_qubits);

/// Single-qubit encoding: row-major pixel triples (a, b, c) become
/// RZ(pi a) RY(pi b) RZ(pi c); a trailing partial triple emits what it has.
EncodedInput sqe_encode(const ImageGrid& image);

struct PcaModel {
  std::size_t side = 0;
  std::size_t k = 0;
  std::vector<double> mean;                     // side^2
  std::vector<std::vector<double>> components;  // k rows of side^2
  std::vector<double> eigenvalues;              // k, descending
  std::vector<double> half_range;               // max |projection| over the fit set
};

/// Top-k eigenvectors of the sample covariance. Components with a
/// non-positive eigenvalue are zero vectors. Throws kInvalidRank when
/// k > side^2 and kEmptyDataset for fewer than two images.
PcaModel pca_fit(std::span<const ImageGrid> train_images, std::size_t k);

/// Raw projections onto the components (no rescaling).
std::vector<double> pca_project(const PcaModel& model, const ImageGrid& image);

/// Projections rescaled from [-half_range, half_range] to [0, 1] and clamped.
/// The fit mean maps to 0.5; zero-padded components map to 0.
std::vector<double> pca_transform(const PcaModel& model, const ImageGrid& image);

enum class EncoderKind : std::uint8_t { kAngle, kAmplitude, kAtp, kPca, kSqe };

const char* to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(const std::string& name);

/// A fitted encoder: the preprocessing state (mask or PCA model) plus the
/// mapping to an EncodedInput.
struct Encoder {
  EncoderKind kind = EncoderKind::kAngle;
  std::size_t side = 0;
  std::optional<PruneMask> mask;  // kAtp
  bool compact = false;           // kAtp: drop pruned qubits
  std::optional<PcaModel> pca;    // kPca

  static Encoder angle(std::size_t side) { return {EncoderKind::kAngle, side, {}, false, {}}; }
  static Encoder amplitude(std::size_t side) {
    return {EncoderKind::kAmplitude, side, {}, false, {}};
  }
  static Encoder sqe(std::size_t side) { return {EncoderKind::kSqe, side, {}, false, {}}; }
  static Encoder atp(PruneMask mask, bool compact = false);
  static Encoder pca_angle(PcaModel model);

  /// Number of data qubits the encoding drives.
  std::size_t data_qubits() const;

  /// Image after preprocessing (mask applied for ATP, identity otherwise).
  ImageGrid preprocess(const ImageGrid& image) const;

  EncodedInput encode(const ImageGrid& image) const;

  /// Pulls a gradient with respect to the encoding rotation angles (one per
  /// prefix gate, in prefix order) back to the raw input pixels. Throws
  /// kUnsupportedGradient for amplitude encoding.
  std::vector<double> pixel_gradient(const ImageGrid& image,
                                     std::span<const double> angle_grads) const;
};

/// Number of qubits amplitude encoding needs for `n_values` values (>= 1).
std::size_t amplitude_qubits(std::size_t n_values);

}  // namespace atpqnn::encoders
