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

#include "atpqnn/app/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "atpqnn/error.hpp"

namespace atpqnn::app {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::kConfig, "config." + field + ": " + what);
}

void reject_unknown(const Json& obj, const std::string& where, std::set<std::string> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
  }
}

const Json& require_object(const Json& doc, const std::string& field) {
  if (!doc.is_object()) fail(field, "must be an object");
  return doc;
}

double get_real(const Json& obj, const std::string& key, const std::string& where, double dflt) {
  if (!obj.contains(key)) return dflt;
  const Json& v = obj.at(key);
  if (!v.is_number()) fail(where + key, "must be a number");
  return v.get<double>();
}

std::size_t get_count(const Json& obj, const std::string& key, const std::string& where,
                      std::size_t dflt) {
  if (!obj.contains(key)) return dflt;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    fail(where + key, "must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

bool get_bool(const Json& obj, const std::string& key, const std::string& where, bool dflt) {
  if (!obj.contains(key)) return dflt;
  const Json& v = obj.at(key);
  if (!v.is_boolean()) fail(where + key, "must be true or false");
  return v.get<bool>();
}

std::string get_string(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_string()) fail(where + key, "must be a string");
  return v.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

DatasetConfig parse_dataset(const Json& d, const std::filesystem::path& base) {
  require_object(d, "dataset");
  reject_unknown(d, "dataset",
                 {"kind", "images", "labels", "csv", "source_side", "class_pair", "n_train",
                  "n_test", "balanced"});
  DatasetConfig out;
  if (!d.contains("kind")) fail("dataset.kind", "missing");
  const std::string kind = get_string(d, "kind", "dataset.");
  if (kind == "mnist") {
    out.kind = DatasetKind::kMnist;
  } else if (kind == "fashion") {
    out.kind = DatasetKind::kFashion;
  } else if (kind == "gray-csv") {
    out.kind = DatasetKind::kGrayCsv;
  } else {
    fail("dataset.kind", "expected mnist, fashion or gray-csv, got '" + kind + "'");
  }
  if (out.kind == DatasetKind::kGrayCsv) {
    if (!d.contains("csv")) fail("dataset.csv", "missing (required for gray-csv)");
    out.csv = resolve(base, get_string(d, "csv", "dataset."));
    out.source_side = get_count(d, "source_side", "dataset.", 0);
    if (out.source_side == 0) fail("dataset.source_side", "missing or zero (required for gray-csv)");
  } else {
    if (!d.contains("images")) fail("dataset.images", "missing");
    if (!d.contains("labels")) fail("dataset.labels", "missing");
    out.images = resolve(base, get_string(d, "images", "dataset."));
    out.labels = resolve(base, get_string(d, "labels", "dataset."));
  }
  if (d.contains("class_pair")) {
    const Json& cp = d.at("class_pair");
    if (!cp.is_array() || cp.size() != 2 || !cp[0].is_number_integer() ||
        !cp[1].is_number_integer()) {
      fail("dataset.class_pair", "must be a pair of integer labels");
    }
    out.class_pair = {cp[0].get<int>(), cp[1].get<int>()};
    if (out.class_pair.first == out.class_pair.second) {
      fail("dataset.class_pair", "classes must differ");
    }
  }
  out.split.n_train = get_count(d, "n_train", "dataset.", out.split.n_train);
  out.split.n_test = get_count(d, "n_test", "dataset.", out.split.n_test);
  out.split.balanced = get_bool(d, "balanced", "dataset.", out.split.balanced);
  if (out.split.n_train < 2) fail("dataset.n_train", "must be at least 2");
  if (out.split.n_test < 1) fail("dataset.n_test", "must be at least 1");
  return out;
}

qnn::TrainConfig parse_train(const Json& t) {
  require_object(t, "train");
  reject_unknown(t, "train", {"epochs", "batch_size", "learning_rate"});
  qnn::TrainConfig out;
  out.epochs = get_count(t, "epochs", "train.", out.epochs);
  out.batch_size = get_count(t, "batch_size", "train.", out.batch_size);
  out.learning_rate = get_real(t, "learning_rate", "train.", out.learning_rate);
  if (out.epochs < 1) fail("train.epochs", "must be at least 1");
  if (out.batch_size < 1) fail("train.batch_size", "must be at least 1");
  if (!(out.learning_rate >= 0.0)) fail("train.learning_rate", "must be non-negative");
  return out;
}

ThresholdConfig parse_threshold(const Json& t) {
  require_object(t, "threshold");
  reject_unknown(t, "threshold",
                 {"tau", "tau_max", "grad_step", "tolerance", "max_iters", "history",
                  "grid_points", "compact", "validation"});
  ThresholdConfig out;
  auto& o = out.options;
  o.tau_max = get_real(t, "tau_max", "threshold.", o.tau_max);
  o.grad_step = get_real(t, "grad_step", "threshold.", o.grad_step);
  o.tolerance = get_real(t, "tolerance", "threshold.", o.tolerance);
  o.max_iters = get_count(t, "max_iters", "threshold.", o.max_iters);
  o.history = get_count(t, "history", "threshold.", o.history);
  o.grid_points = get_count(t, "grid_points", "threshold.", o.grid_points);
  if (!(o.tau_max > 0.0)) fail("threshold.tau_max", "must be positive");
  if (!(o.grad_step > 0.0 && o.grad_step < o.tau_max)) {
    fail("threshold.grad_step", "must lie in (0, tau_max)");
  }
  if (!(o.tolerance > 0.0)) fail("threshold.tolerance", "must be positive");
  if (o.history < 1) fail("threshold.history", "must be at least 1");
  if (o.grid_points < 2) fail("threshold.grid_points", "must be at least 2");
  if (t.contains("tau")) {
    const double tau = get_real(t, "tau", "threshold.", 0.0);
    if (!(tau >= 0.0 && tau <= o.tau_max)) fail("threshold.tau", "must lie in [0, tau_max]");
    out.tau = tau;
  }
  out.compact = get_bool(t, "compact", "threshold.", false);
  out.n_validation = get_count(t, "validation", "threshold.", 0);
  out.use_validation = out.n_validation > 0;
  return out;
}

NoiseSweepConfig parse_noise(const Json& n) {
  require_object(n, "noise");
  reject_unknown(n, "noise", {"p", "trajectories", "scope"});
  NoiseSweepConfig out;
  if (n.contains("p")) {
    const Json& ps = n.at("p");
    if (!ps.is_array() || ps.empty()) fail("noise.p", "must be a non-empty list of numbers");
    out.p.clear();
    for (const auto& v : ps) {
      if (!v.is_number()) fail("noise.p", "must be a non-empty list of numbers");
      const double p = v.get<double>();
      if (!(p >= 0.0 && p <= 1.0)) fail("noise.p", "intensities must lie in [0, 1]");
      out.p.push_back(p);
    }
  }
  out.trajectories = get_count(n, "trajectories", "noise.", out.trajectories);
  if (out.trajectories < 1) fail("noise.trajectories", "must be at least 1");
  if (n.contains("scope")) {
    try {
      out.scope = robustness::noise_scope_from_string(get_string(n, "scope", "noise."));
    } catch (const Error&) {
      fail("noise.scope", "expected all, encoding or model");
    }
  }
  return out;
}

AttackSetup parse_attack(const Json& a) {
  require_object(a, "attack");
  reject_unknown(a, "attack", {"epsilon", "clip", "adversarial_training", "adversarial_fraction"});
  AttackSetup out;
  out.attack.epsilon = get_real(a, "epsilon", "attack.", out.attack.epsilon);
  out.attack.clip = get_bool(a, "clip", "attack.", out.attack.clip);
  out.adversarial_training = get_bool(a, "adversarial_training", "attack.", false);
  out.adversarial_fraction =
      get_real(a, "adversarial_fraction", "attack.", out.adversarial_fraction);
  if (!(out.attack.epsilon >= 0.0)) fail("attack.epsilon", "must be non-negative");
  if (!(out.adversarial_fraction >= 0.0 && out.adversarial_fraction <= 1.0)) {
    fail("attack.adversarial_fraction", "must lie in [0, 1]");
  }
  return out;
}

}  // namespace

const char* to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kMnist: return "mnist";
    case DatasetKind::kFashion: return "fashion";
    case DatasetKind::kGrayCsv: return "gray-csv";
  }
  return "?";
}

ExperimentConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorKind::kConfig, "config: top level must be an object");
  reject_unknown(doc, "",
                 {"dataset", "grid", "encoder", "train", "threshold", "pca", "noise", "attack",
                  "seeds", "workers", "output", "model"});
  ExperimentConfig cfg;
  cfg.echo = doc;
  if (!doc.contains("dataset")) fail("dataset", "missing");
  cfg.dataset = parse_dataset(doc.at("dataset"), base_dir);

  cfg.grid = get_count(doc, "grid", "", cfg.grid);
  if (cfg.grid < 1 || cfg.grid > 4) fail("grid", "must lie in 1..4");

  if (!doc.contains("encoder")) fail("encoder", "missing");
  try {
    cfg.encoder = encoders::encoder_kind_from_string(get_string(doc, "encoder", ""));
  } catch (const Error&) {
    fail("encoder", "expected one of angle, amplitude, atp, pca, sqe");
  }

  if (doc.contains("train")) cfg.train = parse_train(doc.at("train"));

  const bool is_atp = cfg.encoder == encoders::EncoderKind::kAtp;
  if (is_atp && !doc.contains("threshold")) {
    fail("threshold", "missing (required when encoder = atp)");
  }
  if (!is_atp && doc.contains("threshold")) {
    fail("threshold", "only allowed when encoder = atp");
  }
  if (is_atp) cfg.threshold = parse_threshold(doc.at("threshold"));

  if (doc.contains("pca")) {
    if (cfg.encoder != encoders::EncoderKind::kPca) fail("pca", "only allowed when encoder = pca");
    const Json& p = require_object(doc.at("pca"), "pca");
    reject_unknown(p, "pca", {"components"});
    cfg.pca_components = get_count(p, "components", "pca.", 0);
    if (cfg.pca_components > cfg.grid * cfg.grid) fail("pca.components", "exceeds grid^2");
  }

  if (doc.contains("noise")) cfg.noise = parse_noise(doc.at("noise"));
  if (doc.contains("attack")) cfg.attack = parse_attack(doc.at("attack"));

  if (doc.contains("seeds")) {
    const Json& s = doc.at("seeds");
    if (!s.is_array() || s.empty()) fail("seeds", "must be a non-empty list of integers");
    cfg.seeds.clear();
    for (const auto& v : s) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        fail("seeds", "must be a non-empty list of non-negative integers");
      }
      cfg.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  cfg.workers = get_count(doc, "workers", "", cfg.workers);
  if (cfg.workers < 1) fail("workers", "must be at least 1");
  cfg.train.workers = cfg.workers;
  if (doc.contains("output")) cfg.output = resolve(base_dir, get_string(doc, "output", ""));
  if (doc.contains("model")) cfg.model = resolve(base_dir, get_string(doc, "model", ""));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "config: cannot open " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kConfig, "config: " + path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

namespace {

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_csv(csv)) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorKind::kConfig, "--seeds: bad entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, "--seeds: empty list");
  return out;
}

std::vector<double> parse_real_list(const std::string& csv) {
  std::vector<double> out;
  for (const auto& item : split_csv(csv)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorKind::kConfig, "bad numeric entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, "empty numeric list");
  return out;
}

}  // namespace atpqnn::app
