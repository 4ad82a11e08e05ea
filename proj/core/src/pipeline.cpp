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

#include "atpqnn/pipeline.hpp"

#include "atpqnn/error.hpp"

namespace atpqnn::pipeline {

encoders::PruneMask atp_mask(const data::PairDataset& train, double tau) {
  const auto avg0 = encoders::class_average(train.images, train.labels, -1);
  const auto avg1 = encoders::class_average(train.images, train.labels, 1);
  return encoders::build_mask(avg0, avg1, tau);
}

encoders::Encoder fit_encoder(encoders::EncoderKind kind, const data::PairDataset& train,
                              const EncoderOptions& options) {
  if (train.size() == 0) throw Error(ErrorKind::kEmptyDataset, "training set is empty");
  const std::size_t side = train.images.front().side();
  switch (kind) {
    case encoders::EncoderKind::kAngle: return encoders::Encoder::angle(side);
    case encoders::EncoderKind::kAmplitude: return encoders::Encoder::amplitude(side);
    case encoders::EncoderKind::kSqe: return encoders::Encoder::sqe(side);
    case encoders::EncoderKind::kAtp:
      return encoders::Encoder::atp(atp_mask(train, options.tau), options.compact);
    case encoders::EncoderKind::kPca: {
      const std::size_t k = options.pca_components == 0 ? side * side : options.pca_components;
      return encoders::Encoder::pca_angle(encoders::pca_fit(train.images, k));
    }
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown encoder kind");
}

std::vector<qnn::Sample> encode_samples(const data::PairDataset& set,
                                        const encoders::Encoder& encoder) {
  std::vector<qnn::Sample> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.push_back({encoder.encode(set.images[i]), set.labels[i]});
  }
  return out;
}

}  // namespace atpqnn::pipeline
