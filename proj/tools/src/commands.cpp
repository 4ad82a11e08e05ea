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

#include "atpqnn/app/commands.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "atpqnn/app/io.hpp"
#include "atpqnn/atp.hpp"
#include "atpqnn/error.hpp"
#include "atpqnn/pipeline.hpp"
#include "atpqnn/random.hpp"
#include "atpqnn/robustness.hpp"

namespace atpqnn::app {

namespace {

constexpr std::uint64_t kNoiseStream = 31;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Json summary(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
  return {{"mean", mean}, {"stddev", sd}};
}

Json echo_of(const ExperimentConfig& cfg) {
  Json echo = cfg.echo;
  echo["seeds"] = cfg.seeds;
  return echo;
}

Json header(const ExperimentConfig& cfg, const char* command) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  doc["config"] = echo_of(cfg);
  return doc;
}

qnn::TrainConfig train_config_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  qnn::TrainConfig tc = cfg.train;
  tc.seed = seed;
  tc.workers = cfg.workers;
  return tc;
}

atp::PruningSetup pruning_setup(const ExperimentConfig& cfg, const SeedSplit& split,
                                std::uint64_t seed, bool with_validation) {
  atp::PruningSetup setup;
  setup.train = std::make_shared<data::PairDataset>(split.train);
  setup.test = std::make_shared<data::PairDataset>(split.test);
  if (with_validation && split.validation) {
    setup.validation = std::make_shared<data::PairDataset>(*split.validation);
  }
  setup.train_config = train_config_for(cfg, seed);
  setup.compact = cfg.threshold->compact;
  return setup;
}

Json threshold_summary(const atp::ThresholdResult& r) {
  return {{"tau_star", r.tau_star},
          {"best_value", r.best_value},
          {"best_accuracy", r.best_accuracy},
          {"entropy_at_star", r.entropy_at_star},
          {"converged", r.converged},
          {"used_fallback", r.used_fallback},
          {"iterations", r.iterations},
          {"evaluations", r.evaluations.size()}};
}

struct SeedResult {
  Json record;
  SavedModel model;
};

SeedResult run_seed(const data::RawDataset& raw, const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  const SeedSplit split = make_split(raw, cfg, seed);
  Json rec;
  rec["seed"] = seed;

  encoders::Encoder encoder;
  if (cfg.encoder == encoders::EncoderKind::kAtp) {
    const ThresholdConfig& th = *cfg.threshold;
    double tau = 0.0;
    if (th.tau) {
      tau = *th.tau;
    } else {
      const auto setup = pruning_setup(cfg, split, seed, th.use_validation);
      const auto result =
          atp::optimize_threshold({th.options, atp::make_pruning_objective(setup)});
      tau = result.tau_star;
      rec["threshold"] = threshold_summary(result);
    }
    auto mask = pipeline::atp_mask(split.train, tau);
    rec["tau_star"] = tau;
    rec["kept_pixels"] = mask.count_kept();
    encoder = encoders::Encoder::atp(std::move(mask), th.compact);
  } else {
    pipeline::EncoderOptions opts;
    opts.pca_components = cfg.pca_components;
    encoder = pipeline::fit_encoder(cfg.encoder, split.train, opts);
  }

  const auto train_set = pipeline::encode_samples(split.train, encoder);
  const auto test_set = pipeline::encode_samples(split.test, encoder);
  const auto params0 = qnn::ModelParams::random(encoder.data_qubits(), seed);
  const qnn::TrainConfig tc = train_config_for(cfg, seed);

  qnn::TrainReport report;
  if (cfg.attack && cfg.attack->adversarial_training) {
    robustness::AdvTrainConfig adv{tc, cfg.attack->attack, cfg.attack->adversarial_fraction};
    report = robustness::adversarial_train(params0, encoder, split.train, adv);
    const auto eval = qnn::evaluate(report.final_params, test_set, cfg.workers);
    report.test_accuracy = eval.accuracy;
    report.mean_entropy = eval.mean_entropy;
  } else {
    report = qnn::train(params0, train_set, tc, test_set);
  }
  rec["accuracy"] = report.test_accuracy;
  rec["train_accuracy"] = report.train_accuracy;
  rec["entropy"] = report.mean_entropy;
  rec["n_data"] = encoder.data_qubits();
  rec["loss_curve"] = report.loss_curve;

  if (cfg.noise) {
    Json rows = Json::array();
    for (double p : cfg.noise->p) {
      robustness::NoiseConfig nc{p, cfg.noise->trajectories, derive_seed(seed, {kNoiseStream}),
                                 cfg.noise->scope, cfg.workers};
      rows.push_back({{"p", p}, {"accuracy", robustness::noisy_evaluate(report.final_params,
                                                                        test_set, nc)}});
    }
    rec["noise"] = rows;
  }
  if (cfg.attack) {
    rec["attack"] = {{"epsilon", cfg.attack->attack.epsilon},
                     {"accuracy", robustness::attacked_accuracy(report.final_params, encoder,
                                                                split.test, cfg.attack->attack,
                                                                cfg.workers)}};
  }
  rec["wall_seconds"] = seconds_since(t0);
  return {rec, {encoder, report.final_params, seed, cfg.dataset.class_pair, cfg.grid}};
}

std::string csv_cell(const Json& v) {
  return v.is_null() ? std::string() : format_real(v.get<double>());
}

std::string run_csv(const Json& per_seed, const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "seed,accuracy,train_accuracy,entropy";
  const bool atp = cfg.encoder == encoders::EncoderKind::kAtp;
  if (atp) out << ",tau_star,kept_pixels";
  if (cfg.noise) {
    for (double p : cfg.noise->p) out << ",noise_p" << format_real(p);
  }
  if (cfg.attack) out << ",attack_accuracy";
  out << '\n';
  for (const auto& r : per_seed) {
    out << r.at("seed").get<std::uint64_t>() << ',' << csv_cell(r.at("accuracy")) << ','
        << csv_cell(r.at("train_accuracy")) << ',' << csv_cell(r.at("entropy"));
    if (atp) out << ',' << csv_cell(r.at("tau_star")) << ',' << r.at("kept_pixels").get<std::size_t>();
    if (cfg.noise) {
      for (const auto& n : r.at("noise")) out << ',' << csv_cell(n.at("accuracy"));
    }
    if (cfg.attack) out << ',' << csv_cell(r.at("attack").at("accuracy"));
    out << '\n';
  }
  return out.str();
}

Json aggregate(const Json& per_seed, const ExperimentConfig& cfg) {
  auto column = [&](auto&& get) {
    std::vector<double> xs;
    for (const auto& r : per_seed) xs.push_back(get(r));
    return summary(xs);
  };
  Json agg;
  agg["accuracy"] = column([](const Json& r) { return r.at("accuracy").get<double>(); });
  agg["train_accuracy"] =
      column([](const Json& r) { return r.at("train_accuracy").get<double>(); });
  agg["entropy"] = column([](const Json& r) { return r.at("entropy").get<double>(); });
  if (cfg.encoder == encoders::EncoderKind::kAtp) {
    agg["tau_star"] = column([](const Json& r) { return r.at("tau_star").get<double>(); });
  }
  if (cfg.noise) {
    Json rows = Json::array();
    for (std::size_t k = 0; k < cfg.noise->p.size(); ++k) {
      Json s = column([k](const Json& r) { return r.at("noise")[k].at("accuracy").get<double>(); });
      s["p"] = cfg.noise->p[k];
      rows.push_back(s);
    }
    agg["noise"] = rows;
  }
  if (cfg.attack) {
    agg["attack_accuracy"] =
        column([](const Json& r) { return r.at("attack").at("accuracy").get<double>(); });
  }
  return agg;
}

SavedModel load_model(const ExperimentConfig& cfg, const char* command) {
  if (cfg.model.empty()) {
    throw Error(ErrorKind::kConfig, std::string(command) + ": no model (set config.model or --model)");
  }
  Json doc;
  try {
    doc = Json::parse(read_file(cfg.model));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kFormat, cfg.model.string() + ": " + e.what());
  }
  SavedModel m = model_from_json(doc);
  if (m.grid != cfg.grid || m.class_pair != cfg.dataset.class_pair) {
    throw Error(ErrorKind::kConfig,
                "config.model: grid or class_pair differs from the experiment config");
  }
  return m;
}

std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::filesystem::path> out;
  for (const auto& in : inputs) {
    const std::filesystem::path p(in);
    const std::string name = p.filename().string();
    if (name.find_first_of("*?[") == std::string::npos) {
      out.push_back(p);
      continue;
    }
    const auto dir = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
    std::vector<std::filesystem::path> hits;
    if (std::filesystem::is_directory(dir)) {
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (fnmatch(name.c_str(), entry.path().filename().c_str(), 0) == 0) {
          hits.push_back(entry.path());
        }
      }
    }
    std::sort(hits.begin(), hits.end());
    out.insert(out.end(), hits.begin(), hits.end());
  }
  return out;
}

}  // namespace

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

data::RawDataset load_dataset(const DatasetConfig& dataset) {
  if (dataset.kind == DatasetKind::kGrayCsv) {
    return data::load_gray_csv(dataset.csv, dataset.source_side);
  }
  return data::load_idx(dataset.images, dataset.labels);
}

SeedSplit make_split(const data::RawDataset& raw, const ExperimentConfig& cfg,
                     std::uint64_t seed) {
  data::SplitSpec spec = cfg.dataset.split;
  spec.seed = seed;
  const std::size_t n_val =
      cfg.threshold && cfg.threshold->use_validation ? cfg.threshold->n_validation : 0;
  spec.n_test += n_val;
  data::Split s = data::filter_pair(raw, cfg.dataset.class_pair.first,
                                    cfg.dataset.class_pair.second, spec, cfg.grid);
  SeedSplit out{std::move(s.train), std::move(s.test), std::nullopt};
  if (n_val > 0) {
    data::PairDataset val;
    data::PairDataset test;
    val.class_pair = test.class_pair = out.test.class_pair;
    for (std::size_t i = 0; i < out.test.size(); ++i) {
      auto& dst = i < n_val ? val : test;
      dst.images.push_back(out.test.images[i]);
      dst.labels.push_back(out.test.labels[i]);
      dst.source_index.push_back(out.test.source_index[i]);
    }
    out.test = std::move(test);
    out.validation = std::move(val);
  }
  return out;
}

Json cmd_run(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const auto raw = load_dataset(cfg.dataset);
  Json doc = header(cfg, "run");
  Json per_seed = Json::array();
  std::vector<SavedModel> models;
  for (std::uint64_t seed : cfg.seeds) {
    auto r = run_seed(raw, cfg, seed);
    per_seed.push_back(std::move(r.record));
    models.push_back(std::move(r.model));
  }
  doc["aggregate"] = aggregate(per_seed, cfg);
  doc["per_seed"] = per_seed;
  doc["wall_seconds"] = seconds_since(t0);
  if (!cfg.output.empty()) {
    for (const auto& m : models) {
      atomic_write(sibling(cfg.output, ".seed" + std::to_string(m.seed) + ".model.json"),
                   dump(model_to_json(m)));
    }
    atomic_write(sibling(cfg.output, ".csv"), run_csv(per_seed, cfg));
    atomic_write(cfg.output, dump(doc));
  }
  return doc;
}

std::string cmd_sweep(const ExperimentConfig& cfg, const std::vector<double>& taus) {
  if (!cfg.threshold) throw Error(ErrorKind::kConfig, "config.encoder: sweep requires atp");
  if (taus.empty()) throw Error(ErrorKind::kConfig, "--taus: empty list");
  for (double tau : taus) {
    if (!(tau >= 0.0 && tau <= cfg.threshold->options.tau_max)) {
      throw Error(ErrorKind::kConfig, "--taus: " + format_real(tau) + " outside [0, tau_max]");
    }
  }
  const auto raw = load_dataset(cfg.dataset);
  std::ostringstream out;
  out << "seed,tau,accuracy,entropy,kept_pixels\n";
  for (std::uint64_t seed : cfg.seeds) {
    const auto split = make_split(raw, cfg, seed);
    const auto setup = pruning_setup(cfg, split, seed, false);
    for (double tau : taus) {
      const auto o = atp::evaluate_threshold(setup, tau);
      out << seed << ',' << format_real(tau) << ',' << format_real(o.report.test_accuracy) << ','
          << format_real(o.report.mean_entropy) << ',' << o.mask.count_kept() << '\n';
    }
  }
  if (!cfg.output.empty()) atomic_write(cfg.output, out.str());
  return out.str();
}

Json cmd_optimize(const ExperimentConfig& cfg) {
  if (!cfg.threshold) throw Error(ErrorKind::kConfig, "config.encoder: optimize requires atp");
  const auto t0 = Clock::now();
  const auto raw = load_dataset(cfg.dataset);
  Json doc = header(cfg, "optimize");
  Json per_seed = Json::array();
  std::string trace;
  std::vector<double> taus, accs;
  for (std::uint64_t seed : cfg.seeds) {
    const auto split = make_split(raw, cfg, seed);
    const auto setup = pruning_setup(cfg, split, seed, cfg.threshold->use_validation);
    const auto result =
        atp::optimize_threshold({cfg.threshold->options, atp::make_pruning_objective(setup)});
    Json rec = threshold_summary(result);
    rec["seed"] = seed;
    per_seed.push_back(rec);
    taus.push_back(result.tau_star);
    accs.push_back(result.best_accuracy);
    for (std::size_t i = 0; i < result.evaluations.size(); ++i) {
      const auto& e = result.evaluations[i];
      const Json line = {{"seed", seed},
                         {"index", i},
                         {"tau", e.tau},
                         {"value", e.value},
                         {"accuracy", e.accuracy},
                         {"entropy", e.entropy},
                         {"wall_seconds", e.wall_seconds}};
      trace += line.dump() + "\n";
    }
  }
  doc["aggregate"] = {{"tau_star", summary(taus)}, {"best_accuracy", summary(accs)}};
  doc["per_seed"] = per_seed;
  doc["wall_seconds"] = seconds_since(t0);
  if (!cfg.output.empty()) {
    atomic_write(sibling(cfg.output, ".trace.jsonl"), trace);
    atomic_write(cfg.output, dump(doc));
  }
  return doc;
}

Table cmd_table(const std::vector<std::string>& inputs, bool entropy) {
  const auto files = expand_inputs(inputs);
  std::map<std::pair<int, int>, std::map<encoders::EncoderKind, double>> cells;
  std::set<encoders::EncoderKind> columns;
  std::optional<std::size_t> grid;
  for (const auto& f : files) {
    Json doc;
    try {
      doc = Json::parse(read_file(f));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorKind::kFormat, f.string() + ": " + e.what());
    }
    if (doc.is_object() && doc.value("kind", "") == "model") continue;
    if (!doc.is_object() || doc.value("schema_version", 0) != kSchemaVersion ||
        doc.value("command", "") != "run") {
      throw Error(ErrorKind::kFormat, f.string() + ": not a run result");
    }
    const ExperimentConfig cfg = parse_config(doc.at("config"), f.parent_path());
    if (grid && *grid != cfg.grid) {
      throw Error(ErrorKind::kIncompatibleResults,
                  f.string() + ": grid " + std::to_string(cfg.grid) + " differs from " +
                      std::to_string(*grid));
    }
    grid = cfg.grid;
    auto& row = cells[cfg.dataset.class_pair];
    if (row.contains(cfg.encoder)) {
      throw Error(ErrorKind::kIncompatibleResults,
                  f.string() + ": duplicate result for this class pair and encoder");
    }
    const char* field = entropy ? "entropy" : "accuracy";
    row[cfg.encoder] = doc.at("aggregate").at(field).at("mean").get<double>();
    columns.insert(cfg.encoder);
  }

  if (cells.empty()) throw Error(ErrorKind::kConfig, "table: no result files");

  std::vector<std::vector<std::string>> grid_text;
  std::ostringstream csv;
  csv << "class_pair";
  std::vector<std::string> head{"class_pair"};
  for (auto c : columns) {
    csv << ',' << encoders::to_string(c);
    head.emplace_back(encoders::to_string(c));
  }
  csv << '\n';
  grid_text.push_back(head);
  for (const auto& [pair, row] : cells) {
    const std::string label = std::to_string(pair.first) + "-" + std::to_string(pair.second);
    csv << label;
    std::vector<std::string> line{label};
    for (auto c : columns) {
      csv << ',';
      auto it = row.find(c);
      if (it == row.end()) {
        line.emplace_back("-");
        continue;
      }
      csv << format_real(it->second);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", it->second);
      line.emplace_back(buf);
    }
    csv << '\n';
    grid_text.push_back(line);
  }

  std::vector<std::size_t> width(grid_text.front().size(), 0);
  for (const auto& line : grid_text)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::ostringstream text;
  for (const auto& line : grid_text) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) text << "  ";
      const std::size_t pad = width[i] - line[i].size();
      if (i == 0) {
        text << line[i] << std::string(pad, ' ');
      } else {
        text << std::string(pad, ' ') << line[i];
      }
    }
    text << '\n';
  }
  return {csv.str(), text.str()};
}

Json cmd_attack(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const SavedModel m = load_model(cfg, "attack");
  const auto raw = load_dataset(cfg.dataset);
  const auto split = make_split(raw, cfg, m.seed);
  const robustness::AttackConfig attack = cfg.attack ? cfg.attack->attack : robustness::AttackConfig{};
  const auto test_set = pipeline::encode_samples(split.test, m.encoder);
  Json doc = header(cfg, "attack");
  doc["seed"] = m.seed;
  doc["encoder"] = encoders::to_string(m.encoder.kind);
  doc["epsilon"] = attack.epsilon;
  doc["clip"] = attack.clip;
  doc["clean_accuracy"] = qnn::evaluate(m.params, test_set, cfg.workers).accuracy;
  doc["accuracy"] = robustness::attacked_accuracy(m.params, m.encoder, split.test, attack,
                                                  cfg.workers);
  doc["wall_seconds"] = seconds_since(t0);
  if (!cfg.output.empty()) atomic_write(cfg.output, dump(doc));
  return doc;
}

Json cmd_noise(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const SavedModel m = load_model(cfg, "noise");
  const auto raw = load_dataset(cfg.dataset);
  const auto split = make_split(raw, cfg, m.seed);
  const NoiseSweepConfig sweep = cfg.noise ? *cfg.noise : NoiseSweepConfig{};
  const auto test_set = pipeline::encode_samples(split.test, m.encoder);
  Json doc = header(cfg, "noise");
  doc["seed"] = m.seed;
  doc["encoder"] = encoders::to_string(m.encoder.kind);
  doc["trajectories"] = sweep.trajectories;
  doc["scope"] = robustness::to_string(sweep.scope);
  doc["clean_accuracy"] = qnn::evaluate(m.params, test_set, cfg.workers).accuracy;
  Json rows = Json::array();
  for (double p : sweep.p) {
    robustness::NoiseConfig nc{p, sweep.trajectories, derive_seed(m.seed, {kNoiseStream}),
                               sweep.scope, cfg.workers};
    rows.push_back({{"p", p}, {"accuracy", robustness::noisy_evaluate(m.params, test_set, nc)}});
  }
  doc["noise"] = rows;
  doc["wall_seconds"] = seconds_since(t0);
  if (!cfg.output.empty()) atomic_write(cfg.output, dump(doc));
  return doc;
}

}  // namespace atpqnn::app
