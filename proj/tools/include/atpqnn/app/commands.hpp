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

#include <filesystem>
#include <string>
#include <vector>

#include "atpqnn/app/config.hpp"
#include "atpqnn/data.hpp"

namespace atpqnn::app {

data::RawDataset load_dataset(const DatasetConfig& dataset);

/// Train / test (and optional validation) split for one seed.
struct SeedSplit {
  data::PairDataset train;
  data::PairDataset test;
  std::optional<data::PairDataset> validation;
};
SeedSplit make_split(const data::RawDataset& raw, const ExperimentConfig& cfg,
                     std::uint64_t seed);

/// Full pipeline per seed. Returns the result document; when cfg.output is
/// set it is written there together with a per-seed CSV and one saved model
/// per seed (`<stem>.seed<N>.model.json`).
Json cmd_run(const ExperimentConfig& cfg);

/// One row per (seed, tau): seed,tau,accuracy,entropy,kept_pixels. Written
/// to cfg.output when set; the CSV text is returned.
std::string cmd_sweep(const ExperimentConfig& cfg, const std::vector<double>& taus);

/// Threshold optimization per seed; writes the result JSON and the
/// evaluation trace (`<stem>.trace.jsonl`) when cfg.output is set.
Json cmd_optimize(const ExperimentConfig& cfg);

struct Table {
  std::string csv;
  std::string text;
};
/// Rows are class pairs, columns encoders, cells the mean accuracy (or mean
/// entropy). Entries containing '*' or '?' are expanded as file-name globs.
Table cmd_table(const std::vector<std::string>& inputs, bool entropy);

/// FGSM evaluation of a saved model on the test split of its seed.
Json cmd_attack(const ExperimentConfig& cfg);

/// Noise sweep of a saved model on the test split of its seed.
Json cmd_noise(const ExperimentConfig& cfg);

/// Serialized form used for every result file: two-space indent, newline.
std::string dump(const Json& doc);

}  // namespace atpqnn::app
