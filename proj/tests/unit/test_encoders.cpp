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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "atpqnn/encoders.hpp"
#include "atpqnn/qsim.hpp"
#include "oracles/oracles.hpp"
#include "unit/helpers.hpp"

using namespace atpqnn;
using namespace atpqnn::encoders;
using atpqnn::testing::error_kind;
using qsim::GateKind;

namespace {

constexpr double kPi = std::numbers::pi;

ImageGrid random_image(std::size_t side, Rng& rng) {
  std::vector<double> px(side * side);
  for (auto& v : px) v = rng.uniform01();
  return ImageGrid(side, px);
}

ImageGrid filled(std::size_t side, double v) {
  return ImageGrid(side, std::vector<double>(side * side, v));
}

// Direct per-pixel statement of the pruning rule.
bool keep_reference(double a0, double a1, double tau) { return !(a0 < tau && a1 < tau); }

}  // namespace

TEST_CASE("image grids validate their pixels", "[encoders][errors]") {
  CHECK(error_kind([] { ImageGrid(2, {0.1, 0.2, 0.3}); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([] { ImageGrid(1, {1.5}); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([] { ImageGrid(1, {-0.1}); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([] { ImageGrid::unchecked(1, {NAN}); }) == ErrorKind::kInvalidArgument);
  CHECK(ImageGrid::unchecked(1, {1.3})[0] == 1.3);
  const auto z = ImageGrid::zeros(3);
  CHECK(z.size() == 9);
  CHECK(z.at(2, 2) == 0.0);
}

TEST_CASE("class averages", "[encoders]") {
  Rng rng(31);
  SECTION("two identical images average to themselves") {
    const auto img = random_image(3, rng);
    const std::vector<ImageGrid> imgs{img, img};
    const std::vector<int> labels{1, 1};
    CHECK(class_average(imgs, labels, 1) == img);
  }
  SECTION("zeros and ones average to one half") {
    const std::vector<ImageGrid> imgs{filled(2, 0.0), filled(2, 1.0)};
    const std::vector<int> labels{-1, -1};
    CHECK(class_average(imgs, labels, -1) == filled(2, 0.5));
  }
  SECTION("only the requested class contributes") {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<ImageGrid> imgs;
      std::vector<int> labels;
      for (int i = 0; i < 10; ++i) {
        imgs.push_back(random_image(3, rng));
        labels.push_back(i % 3 == 0 ? 1 : -1);
      }
      for (int cls : {-1, 1}) {
        const auto avg = class_average(imgs, labels, cls);
        for (std::size_t p = 0; p < 9; ++p) {
          double sum = 0.0;
          int count = 0;
          for (std::size_t i = 0; i < imgs.size(); ++i) {
            if (labels[i] == cls) {
              sum += imgs[i][p];
              ++count;
            }
          }
          CHECK(std::abs(avg[p] - sum / count) < 1e-15);
        }
      }
    }
  }
  SECTION("errors") {
    const std::vector<ImageGrid> imgs{filled(2, 0.3)};
    const std::vector<int> labels{1};
    CHECK(error_kind([&] { class_average(imgs, labels, -1); }) == ErrorKind::kEmptyClass);
    const std::vector<ImageGrid> mixed{filled(2, 0.3), filled(3, 0.3)};
    const std::vector<int> two{1, 1};
    CHECK(error_kind([&] { class_average(mixed, two, 1); }) == ErrorKind::kShapeMismatch);
  }
}

TEST_CASE("pruning masks", "[encoders]") {
  SECTION("tau = 0 keeps everything") {
    CHECK(build_mask(filled(3, 0.0), filled(3, 0.0), 0.0) == PruneMask::all(3, true));
  }
  SECTION("zero averages under a positive tau prune everything") {
    CHECK(build_mask(filled(3, 0.0), filled(3, 0.0), 0.1) == PruneMask::all(3, false));
  }
  SECTION("one average above tau keeps the pixel") {
    const auto m = build_mask(filled(1, 0.05), filled(1, 0.2), 0.1);
    CHECK(m.kept(0));
  }
  SECTION("equality is not below") {
    CHECK(build_mask(filled(1, 0.1), filled(1, 0.1), 0.1).kept(0));
  }
  SECTION("negative tau is rejected") {
    CHECK(error_kind([] { build_mask(filled(2, 0.0), filled(2, 0.0), -0.01); }) ==
          ErrorKind::kInvalidThreshold);
  }
  SECTION("side mismatch is rejected") {
    CHECK(error_kind([] { build_mask(filled(2, 0.0), filled(3, 0.0), 0.1); }) ==
          ErrorKind::kShapeMismatch);
    CHECK(error_kind([] { apply_mask(filled(2, 0.0), PruneMask::all(3, true)); }) ==
          ErrorKind::kShapeMismatch);
  }
  SECTION("matches the per-pixel rule and grows with tau") {
    Rng rng(32);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto a0 = random_image(3, rng);
      const auto a1 = random_image(3, rng);
      const double t1 = rng.uniform01();
      const double t2 = rng.uniform01();
      const auto m1 = build_mask(a0, a1, t1);
      const auto m2 = build_mask(a0, a1, t2);
      for (std::size_t p = 0; p < 9; ++p) {
        CHECK(m1.kept(p) == keep_reference(a0[p], a1[p], t1));
        if (t1 <= t2 && m2.kept(p)) CHECK(m1.kept(p));
      }
    }
  }
  SECTION("apply_mask copies kept pixels and zeroes the rest") {
    Rng rng(33);
    const auto img = random_image(3, rng);
    CHECK(apply_mask(img, PruneMask::all(3, true)) == img);
    CHECK(apply_mask(img, PruneMask::all(3, false)) == ImageGrid::zeros(3));
    for (int trial = 0; trial < 200; ++trial) {
      const auto x = random_image(3, rng);
      PruneMask m{3, std::vector<std::uint8_t>(9)};
      for (auto& k : m.keep) k = static_cast<std::uint8_t>(rng.below(2));
      const auto y = apply_mask(x, m);
      for (std::size_t p = 0; p < 9; ++p) CHECK(y[p] == (m.keep[p] ? x[p] : 0.0));
      CHECK(apply_mask(y, m) == y);
    }
  }
}

TEST_CASE("angle encoding", "[encoders]") {
  SECTION("one RX(pi x) per pixel in row-major order") {
    const ImageGrid img(2, {0.5, 0.0, 1.0, 0.25});
    const auto enc = angle_encode(img);
    REQUIRE(enc.kind == EncodedKind::kAnglePrefix);
    REQUIRE(enc.n_data == 4);
    REQUIRE(enc.prefix.ops.size() == 4);
    for (std::size_t q = 0; q < 4; ++q) {
      CHECK(enc.prefix.ops[q].kind == GateKind::kRX);
      CHECK(enc.prefix.ops[q].targets[0] == q);
      CHECK(enc.prefix.ops[q].theta == kPi * img[q]);
    }
    CHECK(enc.prefix.ops[0].theta == kPi / 2);
  }
  SECTION("all-zero image stays at |0...0>") {
    const auto enc = angle_encode(ImageGrid::zeros(3));
    const auto s = qsim::run_circuit(qsim::Statevector(9), enc.prefix);
    CHECK(std::abs(s[0] - 1.0) < 1e-15);
  }
  SECTION("pixel 1.0 sends |0> to -i|1>") {
    const auto enc = angle_encode(filled(1, 1.0));
    const auto s = qsim::run_circuit(qsim::Statevector(1), enc.prefix);
    CHECK(std::abs(s[1] - qsim::Complex(0, -1)) < 1e-12);
  }
  SECTION("fully pruned image encodes |0...0>") {
    Rng rng(34);
    const auto img = apply_mask(random_image(3, rng), PruneMask::all(3, false));
    const auto s = qsim::run_circuit(qsim::Statevector(9), angle_encode(img).prefix);
    CHECK(std::abs(s[0] - 1.0) < 1e-15);
  }
  SECTION("compacted encoding drops pruned positions") {
    const ImageGrid img(2, {0.1, 0.2, 0.3, 0.4});
    const PruneMask m{2, {1, 0, 0, 1}};
    const auto enc = angle_encode_kept(img, m);
    REQUIRE(enc.n_data == 2);
    CHECK(enc.prefix.ops[0].theta == kPi * 0.1);
    CHECK(enc.prefix.ops[1].theta == kPi * 0.4);
    CHECK(enc.prefix.ops[1].targets[0] == 1);
    const auto none = angle_encode_kept(img, PruneMask::all(2, false));
    CHECK(none.n_data == 1);
  }
}

TEST_CASE("amplitude encoding", "[encoders]") {
  SECTION("basis vector") {
    const std::vector<double> v{1, 0, 0, 0};
    const auto enc = amplitude_encode(v, 2);
    REQUIRE(enc.kind == EncodedKind::kAmplitudeState);
    CHECK((*enc.state)[0] == qsim::Complex(1.0));
  }
  SECTION("uniform") {
    const std::vector<double> v{1, 1, 1, 1};
    const auto enc = amplitude_encode(v, 2);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs((*enc.state)[i] - 0.5) < 1e-15);
  }
  SECTION("3-4-5") {
    const std::vector<double> v{3, 4};
    const auto enc = amplitude_encode(v, 1);
    CHECK(std::abs((*enc.state)[0] - 0.6) < 1e-15);
    CHECK(std::abs((*enc.state)[1] - 0.8) < 1e-15);
  }
  SECTION("zero padding") {
    const std::vector<double> v{1, 1, 1};
    const auto enc = amplitude_encode(v, 2);
    CHECK(enc.state->amplitudes()[3] == qsim::Complex(0.0));
  }
  SECTION("normalized for random inputs") {
    Rng rng(35);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> v(1 + rng.below(16));
      for (auto& x : v) x = rng.uniform01();
      v[0] += 1e-3;
      const auto enc = amplitude_encode(v, amplitude_qubits(v.size()));
      CHECK(std::abs(enc.state->norm_squared() - 1.0) < 1e-10);
    }
  }
  SECTION("errors") {
    const std::vector<double> zero{0, 0, 0, 0};
    CHECK(error_kind([&] { amplitude_encode(zero, 2); }) == ErrorKind::kUndefinedNormalization);
    const std::vector<double> big{1, 1, 1};
    CHECK(error_kind([&] { amplitude_encode(big, 1); }) == ErrorKind::kInvalidArgument);
  }
  CHECK(amplitude_qubits(1) == 1);
  CHECK(amplitude_qubits(9) == 4);
  CHECK(amplitude_qubits(16) == 4);
}

TEST_CASE("single-qubit encoding", "[encoders]") {
  SECTION("all-zero image is the identity") {
    const auto enc = sqe_encode(ImageGrid::zeros(3));
    CHECK(enc.n_data == 1);
    CHECK(enc.prefix.ops.size() == 9);
    for (const auto& op : enc.prefix.ops) CHECK(op.theta == 0.0);
  }
  SECTION("single pixel emits one RZ") {
    const auto enc = sqe_encode(filled(1, 1.0));
    REQUIRE(enc.prefix.ops.size() == 1);
    CHECK(enc.prefix.ops[0].kind == GateKind::kRZ);
    CHECK(enc.prefix.ops[0].theta == kPi);
  }
  SECTION("Z-Y-Z triple matches the 2x2 product") {
    const ImageGrid img(2, {0.5, 0.5, 0.5, 0.0});
    const auto enc = sqe_encode(img);
    REQUIRE(enc.prefix.ops.size() == 4);
    CHECK(enc.prefix.ops[0].kind == GateKind::kRZ);
    CHECK(enc.prefix.ops[1].kind == GateKind::kRY);
    CHECK(enc.prefix.ops[2].kind == GateKind::kRZ);
    CHECK(enc.prefix.ops[3].kind == GateKind::kRZ);
    const auto s = qsim::run_circuit(qsim::Statevector(1), enc.prefix);
    const double h = kPi / 2;
    const auto u = oracle::full_unitary(1, qsim::GateOp::rz(0, 0.0)) *
                   oracle::full_unitary(1, qsim::GateOp::rz(0, h)) *
                   oracle::full_unitary(1, qsim::GateOp::ry(0, h)) *
                   oracle::full_unitary(1, qsim::GateOp::rz(0, h));
    const auto want = oracle::apply(u, {1.0, 0.0});
    CHECK(testing::max_diff(s.amplitudes(), want) < 1e-12);
    // Bloch vector of RZ RY(pi/2) RZ |0> lies on the equator.
    CHECK(std::abs(qsim::expectation_z(s, 0)) < 1e-12);
  }
}

TEST_CASE("PCA", "[encoders]") {
  SECTION("variance along one axis gives that axis") {
    std::vector<ImageGrid> imgs;
    for (double v : {0.1, 0.3, 0.5, 0.7, 0.9}) imgs.push_back(ImageGrid(2, {0.5, v, 0.5, 0.5}));
    const auto m = pca_fit(imgs, 1);
    CHECK(std::abs(m.components[0][1] - 1.0) < 1e-12);
    CHECK(std::abs(m.components[0][0]) < 1e-12);
  }
  SECTION("the fit mean maps to the midpoint") {
    Rng rng(36);
    std::vector<ImageGrid> imgs;
    for (int i = 0; i < 12; ++i) imgs.push_back(random_image(3, rng));
    const auto m = pca_fit(imgs, 4);
    const ImageGrid mean(3, m.mean);
    for (double v : pca_transform(m, mean)) CHECK(std::abs(v - 0.5) < 1e-12);
    for (const auto& img : imgs) {
      for (double v : pca_transform(m, img)) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
  SECTION("matches a Jacobi eigendecomposition on 4x4 grids") {
    Rng rng(37);
    std::vector<ImageGrid> imgs;
    for (int i = 0; i < 10; ++i) imgs.push_back(random_image(4, rng));
    const std::size_t dim = 16, k = 3;
    const auto m = pca_fit(imgs, k);

    std::vector<double> mean(dim, 0.0);
    for (const auto& img : imgs)
      for (std::size_t i = 0; i < dim; ++i) mean[i] += img[i] / imgs.size();
    std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
    for (const auto& img : imgs)
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          cov[i][j] += (img[i] - mean[i]) * (img[j] - mean[j]) / (imgs.size() - 1);
    auto eig = oracle::jacobi_eigen(cov);
    for (std::size_t c = 0; c < k; ++c) {
      auto& v = eig.vectors[c];
      std::size_t arg = 0;
      for (std::size_t i = 1; i < dim; ++i)
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
      if (v[arg] < 0)
        for (auto& x : v) x = -x;
      CHECK(std::abs(m.eigenvalues[c] - eig.values[c]) < 1e-10);
    }
    for (const auto& img : imgs) {
      const auto p = pca_project(m, img);
      for (std::size_t c = 0; c < k; ++c) {
        double want = 0.0;
        for (std::size_t i = 0; i < dim; ++i) want += eig.vectors[c][i] * (img[i] - mean[i]);
        CHECK(std::abs(p[c] - want) < 1e-8);
      }
    }
  }
  SECTION("components are orthonormal; missing rank is zero padded") {
    Rng rng(38);
    std::vector<ImageGrid> imgs;
    for (int i = 0; i < 4; ++i) imgs.push_back(random_image(3, rng));
    const auto m = pca_fit(imgs, 9);
    std::size_t live = 0;
    for (std::size_t a = 0; a < 9; ++a) {
      double norm = 0.0;
      for (double x : m.components[a]) norm += x * x;
      if (norm == 0.0) {
        CHECK(m.eigenvalues[a] == 0.0);
        continue;
      }
      ++live;
      CHECK(std::abs(norm - 1.0) < 1e-8);
      for (std::size_t b = a + 1; b < 9; ++b) {
        double dot = 0.0;
        for (std::size_t i = 0; i < 9; ++i) dot += m.components[a][i] * m.components[b][i];
        CHECK(std::abs(dot) < 1e-8);
      }
    }
    CHECK(live == 3);
    const auto t = pca_transform(m, imgs[0]);
    for (std::size_t c = live; c < 9; ++c) CHECK(t[c] == 0.0);
  }
  SECTION("errors") {
    const std::vector<ImageGrid> one{filled(2, 0.2)};
    CHECK(error_kind([&] { pca_fit(one, 1); }) == ErrorKind::kEmptyDataset);
    const std::vector<ImageGrid> two{filled(2, 0.2), filled(2, 0.4)};
    CHECK(error_kind([&] { pca_fit(two, 5); }) == ErrorKind::kInvalidRank);
  }
}

TEST_CASE("encoder dispatch", "[encoders]") {
  Rng rng(39);
  const auto img = random_image(3, rng);
  CHECK(Encoder::angle(3).data_qubits() == 9);
  CHECK(Encoder::amplitude(3).data_qubits() == 4);
  CHECK(Encoder::sqe(3).data_qubits() == 1);
  PruneMask m{3, {1, 0, 1, 0, 0, 0, 1, 1, 0}};
  CHECK(Encoder::atp(m, false).data_qubits() == 9);
  CHECK(Encoder::atp(m, true).data_qubits() == 4);

  const auto atp = Encoder::atp(m, false);
  CHECK(atp.preprocess(img) == apply_mask(img, m));
  const auto e = atp.encode(img);
  for (std::size_t q = 0; q < 9; ++q) {
    CHECK(e.prefix.ops[q].theta == (m.keep[q] ? kPi * img[q] : 0.0));
  }

  for (const char* name : {"angle", "amplitude", "atp", "pca", "sqe"}) {
    CHECK(std::string(to_string(encoder_kind_from_string(name))) == name);
  }
  CHECK(error_kind([] { encoder_kind_from_string("frqi"); }) == ErrorKind::kConfig);

  SECTION("pixel gradients pull back through each encoder") {
    const std::vector<double> g9{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const auto ga = Encoder::angle(3).pixel_gradient(img, g9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(ga[i] == kPi * g9[i]);
    const auto gm = atp.pixel_gradient(img, g9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(gm[i] == (m.keep[i] ? kPi * g9[i] : 0.0));
    const auto gs = Encoder::sqe(3).pixel_gradient(img, g9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(gs[i] == kPi * g9[i]);
    CHECK(error_kind([&] { Encoder::amplitude(3).pixel_gradient(img, g9); }) ==
          ErrorKind::kUnsupportedGradient);
  }
}
