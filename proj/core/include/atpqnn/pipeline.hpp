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

/// \file pipeline.hpp
/// Glue between datasets, encoders and the classifier.
#pragma once

#include <cstddef>
#include <vector>

#include "atpqnn/data.hpp"
#include "atpqnn/encoders.hpp"
#include "atpqnn/qnn.hpp"

namespace atpqnn::pipeline {

struct EncoderOptions {
  double tau = 0.0;             // atp
  bool compact = false;         // atp
  std::size_t pca_components = 0;  // pca; 0 means side^2
};

/// Pruning mask from the training-set class averages (label -1 vs +1).
encoders::PruneMask atp_mask(const data::PairDataset& train, double tau);

/// Fits whatever state the encoder needs (mask, PCA model) on `train`.
encoders::Encoder fit_encoder(encoders::EncoderKind kind, const data::PairDataset& train,
                              const EncoderOptions& options = {});

std::vector<qnn::Sample> encode_samples(const data::PairDataset& set,
                                        const encoders::Encoder& encoder);

}  // namespace atpqnn::pipeline
