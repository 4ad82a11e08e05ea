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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "atpqnn/atp.hpp"
#include "atpqnn/data.hpp"
#include "atpqnn/encoders.hpp"
#include "atpqnn/qnn.hpp"
#include "atpqnn/robustness.hpp"

namespace atpqnn::app {

using Json = nlohmann::json;

enum class DatasetKind : std::uint8_t { kMnist, kFashion, kGrayCsv };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::kMnist;
  std::filesystem::path images;  // idx kinds
  std::filesystem::path labels;  // idx kinds
  std::filesystem::path csv;     // gray-csv
  std::size_t source_side = 28;  // gray-csv
  std::pair<int, int> class_pair{0, 1};
  data::SplitSpec split;         // seed filled per run
};

struct ThresholdConfig {
  atp::ThresholdOptions options;
  std::optional<double> tau;  // fixed threshold; skips optimization in `run`
  bool compact = false;
  bool use_validation = false;
  std::size_t n_validation = 100;
};

struct NoiseSweepConfig {
  std::vector<double> p{0.03, 0.05, 0.10};
  std::size_t trajectories = 200;
  robustness::NoiseScope scope = robustness::NoiseScope::kAll;
};

struct AttackSetup {
  robustness::AttackConfig attack;
  bool adversarial_training = false;
  double adversarial_fraction = 0.5;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  std::size_t grid = 3;
  encoders::EncoderKind encoder = encoders::EncoderKind::kAngle;
  qnn::TrainConfig train;
  std::optional<ThresholdConfig> threshold;
  std::size_t pca_components = 0;
  std::optional<NoiseSweepConfig> noise;
  std::optional<AttackSetup> attack;
  std::vector<std::uint64_t> seeds{1};
  std::size_t workers = 1;
  std::filesystem::path output;
  std::filesystem::path model;  // attack / noise subcommands

  Json echo;  // the config document as read
};

/// Parses and validates a config document. Relative paths resolve against
/// `base_dir`. Throws Error(kConfig) with the offending field in the message.
ExperimentConfig parse_config(const Json& doc, const std::filesystem::path& base_dir);

ExperimentConfig load_config(const std::filesystem::path& path);

/// "1,2,3" -> {1, 2, 3}. Throws Error(kConfig) on malformed entries.
std::vector<std::uint64_t> parse_seed_list(const std::string& csv);
std::vector<double> parse_real_list(const std::string& csv);

const char* to_string(DatasetKind kind);

}  // namespace atpqnn::app
