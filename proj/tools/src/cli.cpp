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

#include "atpqnn/app/cli.hpp"

#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atpqnn/app/commands.hpp"
#include "atpqnn/app/config.hpp"
#include "atpqnn/app/io.hpp"
#include "atpqnn/error.hpp"

namespace atpqnn::app {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string seeds;
  std::string taus;
  std::string model;
  std::size_t workers = 0;
  bool entropy = false;
  std::vector<std::string> files;
};

ExperimentConfig prepare(const Options& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (!o.seeds.empty()) {
    cfg.seeds = parse_seed_list(o.seeds);
    cfg.echo["seeds"] = cfg.seeds;
  }
  if (!o.out.empty()) cfg.output = o.out;
  if (!o.model.empty()) cfg.model = o.model;
  if (o.workers > 0) {
    cfg.workers = o.workers;
    cfg.train.workers = o.workers;
  }
  return cfg;
}

void emit(const Json& doc, const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.output.empty()) {
    out << dump(doc);
  } else {
    out << "wrote " << cfg.output.string() << '\n';
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive threshold pruning experiments for quantum neural networks", "atpqnn"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment config (JSON)")->required();
    sub->add_option("--out", o.out, "Output path (overrides config.output)");
    sub->add_option("--workers", o.workers, "Worker threads (overrides config.workers)");
  };

  auto* run = app.add_subcommand("run", "Train and evaluate every seed");
  add_common(run);
  run->add_option("--seeds", o.seeds, "Comma-separated seeds");

  auto* sweep = app.add_subcommand("sweep", "Manual threshold sweep (atp)");
  add_common(sweep);
  sweep->add_option("--seeds", o.seeds, "Comma-separated seeds");
  sweep->add_option("--taus", o.taus, "Comma-separated thresholds")->required();

  auto* optimize = app.add_subcommand("optimize", "Threshold optimization (atp)");
  add_common(optimize);
  optimize->add_option("--seeds", o.seeds, "Comma-separated seeds");

  auto* table = app.add_subcommand("table", "Compare run results");
  table->add_option("files", o.files, "Result files or globs")->required();
  table->add_flag("--entropy", o.entropy, "Tabulate mean entropy instead of accuracy");
  table->add_option("--out", o.out, "CSV output path");

  auto* attack = app.add_subcommand("attack", "FGSM evaluation of a saved model");
  add_common(attack);
  attack->add_option("--model", o.model, "Saved model (overrides config.model)");

  auto* noise = app.add_subcommand("noise", "Noise sweep of a saved model");
  add_common(noise);
  noise->add_option("--model", o.model, "Saved model (overrides config.model)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (run->parsed()) {
      const auto cfg = prepare(o);
      emit(cmd_run(cfg), cfg, out);
    } else if (sweep->parsed()) {
      const auto cfg = prepare(o);
      const auto taus = parse_real_list(o.taus);
      const auto csv = cmd_sweep(cfg, taus);
      if (cfg.output.empty()) {
        out << csv;
      } else {
        out << "wrote " << cfg.output.string() << '\n';
      }
    } else if (optimize->parsed()) {
      const auto cfg = prepare(o);
      emit(cmd_optimize(cfg), cfg, out);
    } else if (table->parsed()) {
      const auto t = cmd_table(o.files, o.entropy);
      if (!o.out.empty()) atomic_write(o.out, t.csv);
      out << t.text;
    } else if (attack->parsed()) {
      auto cfg = prepare(o);
      cfg.output = o.out;
      emit(cmd_attack(cfg), cfg, out);
    } else if (noise->parsed()) {
      auto cfg = prepare(o);
      cfg.output = o.out;
      emit(cmd_noise(cfg), cfg, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

}  // namespace atpqnn::app
