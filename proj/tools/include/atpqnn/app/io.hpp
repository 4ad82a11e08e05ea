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
#include <string>
#include <utility>

#include "atpqnn/app/config.hpp"
#include "atpqnn/encoders.hpp"
#include "atpqnn/error.hpp"
#include "atpqnn/qnn.hpp"

namespace atpqnn::app {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

/// Writes to a sibling temporary file and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

/// `dir/stem.suffix` next to `path`, e.g. sibling(out.json, ".trace.jsonl").
std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix);

Json encoder_to_json(const encoders::Encoder& encoder);
encoders::Encoder encoder_from_json(const Json& doc);

struct SavedModel {
  encoders::Encoder encoder;
  qnn::ModelParams params;
  std::uint64_t seed = 0;
  std::pair<int, int> class_pair{0, 1};
  std::size_t grid = 0;
};

Json model_to_json(const SavedModel& model);
/// Throws Error(kFormat) for a document that is not a saved model.
SavedModel model_from_json(const Json& doc);

/// 0 ok, 2 config, 3 data, 4 runtime.
int exit_code_for(ErrorKind kind);

}  // namespace atpqnn::app
