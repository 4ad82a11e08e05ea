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

#include "atpqnn/app/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace atpqnn::app {

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error(ErrorKind::kInvalidArgument, "cannot format number");
  return std::string(buf.data(), ptr);
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot rename into " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + suffix);
}

Json encoder_to_json(const encoders::Encoder& encoder) {
  Json out;
  out["kind"] = encoders::to_string(encoder.kind);
  out["side"] = encoder.side;
  if (encoder.mask) {
    out["mask"] = encoder.mask->keep;
    out["compact"] = encoder.compact;
  }
  if (encoder.pca) {
    const auto& p = *encoder.pca;
    out["pca"] = {{"k", p.k},
                  {"mean", p.mean},
                  {"components", p.components},
                  {"eigenvalues", p.eigenvalues},
                  {"half_range", p.half_range}};
  }
  return out;
}

encoders::Encoder encoder_from_json(const Json& doc) {
  try {
    const auto kind = encoders::encoder_kind_from_string(doc.at("kind").get<std::string>());
    const auto side = doc.at("side").get<std::size_t>();
    switch (kind) {
      case encoders::EncoderKind::kAngle: return encoders::Encoder::angle(side);
      case encoders::EncoderKind::kAmplitude: return encoders::Encoder::amplitude(side);
      case encoders::EncoderKind::kSqe: return encoders::Encoder::sqe(side);
      case encoders::EncoderKind::kAtp: {
        encoders::PruneMask mask{side, doc.at("mask").get<std::vector<std::uint8_t>>()};
        if (mask.keep.size() != side * side) {
          throw Error(ErrorKind::kFormat, "saved mask has the wrong size");
        }
        return encoders::Encoder::atp(std::move(mask), doc.at("compact").get<bool>());
      }
      case encoders::EncoderKind::kPca: {
        const Json& p = doc.at("pca");
        encoders::PcaModel m;
        m.side = side;
        m.k = p.at("k").get<std::size_t>();
        m.mean = p.at("mean").get<std::vector<double>>();
        m.components = p.at("components").get<std::vector<std::vector<double>>>();
        m.eigenvalues = p.at("eigenvalues").get<std::vector<double>>();
        m.half_range = p.at("half_range").get<std::vector<double>>();
        return encoders::Encoder::pca_angle(std::move(m));
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("malformed encoder: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kFormat) throw;
    throw Error(ErrorKind::kFormat, std::string("malformed encoder: ") + e.what());
  }
  throw Error(ErrorKind::kFormat, "malformed encoder");
}

Json model_to_json(const SavedModel& model) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "model";
  out["seed"] = model.seed;
  out["grid"] = model.grid;
  out["class_pair"] = {model.class_pair.first, model.class_pair.second};
  out["encoder"] = encoder_to_json(model.encoder);
  out["n_data"] = model.params.n_data();
  out["params"] = std::vector<double>(model.params.values().begin(), model.params.values().end());
  return out;
}

SavedModel model_from_json(const Json& doc) {
  try {
    if (doc.at("kind").get<std::string>() != "model") {
      throw Error(ErrorKind::kFormat, "not a saved model");
    }
    if (doc.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error(ErrorKind::kFormat, "unsupported model schema_version");
    }
    SavedModel m;
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.grid = doc.at("grid").get<std::size_t>();
    const auto cp = doc.at("class_pair").get<std::vector<int>>();
    if (cp.size() != 2) throw Error(ErrorKind::kFormat, "class_pair must have two entries");
    m.class_pair = {cp[0], cp[1]};
    m.encoder = encoder_from_json(doc.at("encoder"));
    const auto n_data = doc.at("n_data").get<std::size_t>();
    auto theta = doc.at("params").get<std::vector<double>>();
    if (theta.size() != qnn::ModelParams::count_for(n_data) ||
        n_data != m.encoder.data_qubits()) {
      throw Error(ErrorKind::kFormat, "parameter count does not match the encoder");
    }
    m.params = qnn::ModelParams(n_data, std::move(theta));
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("malformed model: ") + e.what());
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidThreshold:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kInvalidRank:
    case ErrorKind::kIncompatibleResults:
      return 2;
    case ErrorKind::kFormat:
    case ErrorKind::kLength:
    case ErrorKind::kConsistency:
    case ErrorKind::kCapacity:
    case ErrorKind::kIo:
    case ErrorKind::kEmptyDataset:
    case ErrorKind::kEmptyClass:
      return 3;
    default:
      return 4;
  }
}

}  // namespace atpqnn::app
