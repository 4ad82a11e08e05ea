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

/// \file data.hpp
/// Dataset ingestion (IDX, headerless grayscale CSV), class-pair splits and
/// block-average downscaling.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "atpqnn/encoders.hpp"

namespace atpqnn::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct RawDataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::uint8_t>> images;  // rows * cols bytes each
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

/// Big-endian IDX image (magic 0x803) and label (magic 0x801) files.
RawDataset load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path);
void write_idx(const RawDataset& raw, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path);

/// One sample per line: label, then side*side integers in 0..255.
RawDataset load_gray_csv(const std::filesystem::path& path, std::size_t side);
void write_gray_csv(const RawDataset& raw, const std::filesystem::path& path);

struct PairDataset {
  std::vector<encoders::ImageGrid> images;
  std::vector<int> labels;  // c0 -> -1, c1 -> +1
  std::pair<int, int> class_pair{0, 1};
  std::vector<std::size_t> source_index;  // row in the RawDataset

  std::size_t size() const { return labels.size(); }
};

struct SplitSpec {
  std::size_t n_train = 200;
  std::size_t n_test = 200;
  std::uint64_t seed = 0;
  bool balanced = true;
};

struct Split {
  PairDataset train;
  PairDataset test;
};

/// Keeps classes c0 / c1, maps them to -1 / +1, and draws disjoint seeded
/// train and test sets downscaled to grid_side. Balanced splits give c0
/// floor(n/2) samples and c1 the rest. Throws kCapacity when a class runs out.
Split filter_pair(const RawDataset& raw, int c0, int c1, const SplitSpec& split,
                  std::size_t grid_side);

/// Block-average downscaling of a square byte image to s x s, divided by 255.
/// Block edges sit at round(k * side / s).
encoders::ImageGrid downscale(std::span<const std::uint8_t> source, std::size_t source_side,
                              std::size_t s);

}  // namespace atpqnn::data
