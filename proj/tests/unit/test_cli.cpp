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

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "atpqnn/app/cli.hpp"
#include "atpqnn/app/config.hpp"
#include "atpqnn/app/io.hpp"
#include "atpqnn/data.hpp"
#include "atpqnn/random.hpp"
#include "unit/helpers.hpp"
#include "unit/temp_dir.hpp"

using namespace atpqnn;
using atpqnn::app::Json;
using atpqnn::testing::error_kind;
using atpqnn::testing::TempDir;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "atpqnn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Json read_json(const std::filesystem::path& p) { return Json::parse(app::read_file(p)); }

void write_json(const std::filesystem::path& p, const Json& doc) {
  std::ofstream(p) << doc.dump(2);
}

// 4x4 source images, classes 0/1/2. Class 0 is bright on the left half,
// class 1 on the right half, class 2 is uniform noise.
void write_toy_csv(const std::filesystem::path& path) {
  Rng rng(5);
  data::RawDataset raw;
  raw.rows = raw.cols = 4;
  for (int i = 0; i < 90; ++i) {
    const int cls = i % 3;
    std::vector<std::uint8_t> px(16);
    for (std::size_t k = 0; k < 16; ++k) {
      const bool left = k % 4 < 2;
      const bool bright = (cls == 0 && left) || (cls == 1 && !left) || (cls == 2 && rng.below(2));
      px[k] = static_cast<std::uint8_t>(bright ? 150 + rng.below(100) : rng.below(90));
    }
    raw.images.push_back(std::move(px));
    raw.labels.push_back(cls);
  }
  data::write_gray_csv(raw, path);
}

Json toy_config(const std::string& encoder = "angle") {
  Json cfg = {{"dataset",
               {{"kind", "gray-csv"},
                {"csv", "toy.csv"},
                {"source_side", 4},
                {"class_pair", {0, 1}},
                {"n_train", 16},
                {"n_test", 12}}},
              {"grid", 2},
              {"encoder", encoder},
              {"train", {{"epochs", 3}, {"batch_size", 4}, {"learning_rate", 0.1}}},
              {"seeds", Json::array({1})}};
  if (encoder == "atp") {
    cfg["threshold"] = {{"tau_max", 1.0}, {"grad_step", 0.05}, {"tolerance", 0.01},
                        {"max_iters", 4}, {"grid_points", 5}};
  }
  return cfg;
}

void strip_wall(Json& j) {
  if (j.is_object()) {
    j.erase("wall_seconds");
    for (auto& [k, v] : j.items()) strip_wall(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_wall(v);
  }
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

class Workspace {
 public:
  Workspace() : dir_("cli") { write_toy_csv(dir_ / "toy.csv"); }

  std::string config(const Json& cfg, const std::string& name = "cfg.json") const {
    write_json(dir_ / name, cfg);
    return (dir_ / name).string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  TempDir dir_;
};

}  // namespace

TEST_CASE("list parsing", "[cli]") {
  CHECK(app::parse_seed_list("1,2, 3") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(error_kind([] { app::parse_seed_list("1,x"); }) == ErrorKind::kConfig);
  CHECK(error_kind([] { app::parse_seed_list(""); }) == ErrorKind::kConfig);
  CHECK(app::parse_real_list("0,0.25,1") == std::vector<double>{0.0, 0.25, 1.0});
  CHECK(error_kind([] { app::parse_real_list("0.1,,0.2"); }) == ErrorKind::kConfig);
}

TEST_CASE("config validation", "[cli]") {
  const std::filesystem::path base = "/tmp/base";
  CHECK_NOTHROW(app::parse_config(toy_config(), base));
  const auto parsed = app::parse_config(toy_config(), base);
  CHECK(parsed.dataset.csv == base / "toy.csv");
  CHECK(parsed.train.epochs == 3);

  auto bad = [&](auto&& mutate) {
    Json cfg = toy_config();
    mutate(cfg);
    return error_kind([&] { app::parse_config(cfg, base); });
  };
  CHECK(bad([](Json& c) { c["bogus"] = 1; }) == ErrorKind::kConfig);
  CHECK(bad([](Json& c) { c["grid"] = 5; }) == ErrorKind::kConfig);
  CHECK(bad([](Json& c) { c["encoder"] = "atp"; }) == ErrorKind::kConfig);
  CHECK(bad([](Json& c) { c["threshold"] = Json::object(); }) == ErrorKind::kConfig);
  CHECK(bad([](Json& c) { c["train"]["epochs"] = -1; }) == ErrorKind::kConfig);
  CHECK(bad([](Json& c) { c["seeds"] = Json::array(); }) == ErrorKind::kConfig);
  CHECK(bad([](Json& c) { c["dataset"].erase("csv"); }) == ErrorKind::kConfig);
  CHECK(bad([](Json& c) { c["pca"] = {{"components", 2}}; }) == ErrorKind::kConfig);
  CHECK(bad([](Json& c) { c["noise"] = {{"scope", "gates"}}; }) == ErrorKind::kConfig);

  try {
    Json cfg = toy_config("atp");
    cfg.erase("threshold");
    app::parse_config(cfg, base);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("threshold") != std::string::npos);
  }
}

TEST_CASE("exit codes", "[cli]") {
  Workspace ws;
  SECTION("usage errors") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"run"}).code == 2);
    CHECK(cli({"sweep", "--config", ws.config(toy_config("atp"))}).code == 2);
    CHECK(cli({"--help"}).code == 0);
  }
  SECTION("config errors") {
    Json atp = toy_config("atp");
    atp.erase("threshold");
    CHECK(cli({"run", "--config", ws.config(atp)}).code == 2);
    CHECK(cli({"run", "--config", ws.path("missing.json")}).code == 2);
    std::ofstream(ws.path("broken.json")) << "{ not json";
    CHECK(cli({"run", "--config", ws.path("broken.json")}).code == 2);
    CHECK(cli({"run", "--config", ws.config(toy_config()), "--seeds", "1,a"}).code == 2);
    CHECK(cli({"sweep", "--config", ws.config(toy_config()), "--taus", "0.1"}).code == 2);
    CHECK(cli({"sweep", "--config", ws.config(toy_config("atp")), "--taus", "1.5"}).code == 2);
  }
  SECTION("data errors") {
    Json cfg = toy_config();
    cfg["dataset"]["csv"] = "nowhere.csv";
    const auto r = cli({"run", "--config", ws.config(cfg)});
    CHECK(r.code == 3);
    CHECK(r.err.find("error:") != std::string::npos);
    cfg = toy_config();
    cfg["dataset"]["n_train"] = 400;
    CHECK(cli({"run", "--config", ws.config(cfg)}).code == 3);
    std::ofstream(ws.path("ragged.csv")) << "0,1,2\n";
    cfg = toy_config();
    cfg["dataset"]["csv"] = "ragged.csv";
    CHECK(cli({"run", "--config", ws.config(cfg)}).code == 3);
  }
  SECTION("runtime errors") {
    Json cfg = toy_config("amplitude");
    const auto out = ws.path("amp.json");
    REQUIRE(cli({"run", "--config", ws.config(cfg), "--out", out}).code == 0);
    CHECK(cli({"attack", "--config", ws.config(cfg), "--model", ws.path("amp.seed1.model.json")})
              .code == 4);
  }
}

TEST_CASE("run", "[cli]") {
  Workspace ws;
  const auto out = ws.path("res/angle.json");
  const auto r = cli({"run", "--config", ws.config(toy_config()), "--out", out, "--seeds", "1,2"});
  REQUIRE(r.code == 0);
  const Json doc = read_json(out);
  CHECK(doc.at("schema_version") == 1);
  CHECK(doc.at("command") == "run");
  CHECK(doc.at("config").at("seeds") == Json({1, 2}));
  const auto& seeds = doc.at("per_seed");
  REQUIRE(seeds.size() == 2);

  for (const char* field : {"accuracy", "entropy", "train_accuracy"}) {
    const double a = seeds[0].at(field).get<double>();
    const double b = seeds[1].at(field).get<double>();
    const auto& agg = doc.at("aggregate").at(field);
    CHECK(agg.at("mean").get<double>() == (a + b) / 2);
    CHECK(agg.at("stddev").get<double>() == Catch::Approx(std::abs(a - b) / std::sqrt(2.0)));
  }
  for (const auto& s : seeds) {
    CHECK(s.at("n_data") == 4);
    CHECK(s.at("loss_curve").size() == 3);
    CHECK(s.at("accuracy").get<double>() >= 0.0);
    CHECK(s.at("accuracy").get<double>() <= 1.0);
  }

  SECTION("csv mirrors the json exactly") {
    const auto rows = csv_rows(app::read_file(ws.path("res/angle.csv")));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"seed", "accuracy", "train_accuracy", "entropy"});
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::stoull(rows[i + 1][0]) == seeds[i].at("seed").get<std::uint64_t>());
      CHECK(std::stod(rows[i + 1][1]) == seeds[i].at("accuracy").get<double>());
      CHECK(std::stod(rows[i + 1][2]) == seeds[i].at("train_accuracy").get<double>());
      CHECK(std::stod(rows[i + 1][3]) == seeds[i].at("entropy").get<double>());
    }
  }
  SECTION("models are saved per seed and reload") {
    for (int s : {1, 2}) {
      const auto m = app::model_from_json(read_json(ws.path("res/angle.seed" + std::to_string(s) +
                                                            ".model.json")));
      CHECK(m.seed == static_cast<std::uint64_t>(s));
      CHECK(m.grid == 2);
      CHECK(m.params.size() == qnn::ModelParams::count_for(4));
    }
  }
  SECTION("stdout when no output path is set") {
    const auto r2 = cli({"run", "--config", ws.config(toy_config())});
    REQUIRE(r2.code == 0);
    Json a = Json::parse(r2.out);
    Json b = doc;
    strip_wall(a);
    strip_wall(b);
    CHECK(a.at("per_seed")[0] == b.at("per_seed")[0]);
  }
  SECTION("identical across worker counts") {
    const auto out2 = ws.path("res/angle_w2.json");
    REQUIRE(cli({"run", "--config", ws.config(toy_config()), "--out", out2, "--seeds", "1,2",
                 "--workers", "2"})
                .code == 0);
    Json a = doc;
    Json b = read_json(out2);
    strip_wall(a);
    strip_wall(b);
    CHECK(a.dump() == b.dump());
  }
}

TEST_CASE("run with atp", "[cli]") {
  Workspace ws;
  const auto out = ws.path("atp.json");
  REQUIRE(cli({"run", "--config", ws.config(toy_config("atp")), "--out", out}).code == 0);
  const Json doc = read_json(out);
  const auto& s = doc.at("per_seed")[0];
  const double tau = s.at("tau_star").get<double>();
  CHECK(tau >= 0.0);
  CHECK(tau <= 1.0);
  CHECK(s.at("threshold").at("tau_star").get<double>() == tau);
  CHECK(s.at("kept_pixels").get<std::size_t>() <= 4);
  CHECK(doc.at("aggregate").contains("tau_star"));
  const auto rows = csv_rows(app::read_file(ws.path("atp.csv")));
  CHECK(rows[0].back() == "kept_pixels");

  SECTION("fixed tau skips the search") {
    Json cfg = toy_config("atp");
    cfg["threshold"]["tau"] = 0.0;
    const auto r = cli({"run", "--config", ws.config(cfg)});
    REQUIRE(r.code == 0);
    const Json fixed = Json::parse(r.out);
    CHECK_FALSE(fixed.at("per_seed")[0].contains("threshold"));
    CHECK(fixed.at("per_seed")[0].at("kept_pixels") == 4);
  }
}

TEST_CASE("sweep", "[cli]") {
  Workspace ws;
  const auto r = cli({"sweep", "--config", ws.config(toy_config("atp")), "--taus", "0.6,0,0.3",
                      "--seeds", "1,2"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"seed", "tau", "accuracy", "entropy", "kept_pixels"});
  const std::vector<std::string> order{"0.6", "0", "0.3"};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(rows[i + 1][0] == (i < 3 ? "1" : "2"));
    CHECK(rows[i + 1][1] == order[i % 3]);
  }

  SECTION("tau = 0 reproduces the angle baseline") {
    const auto base = cli({"run", "--config", ws.config(toy_config()), "--seeds", "1,2"});
    REQUIRE(base.code == 0);
    const Json doc = Json::parse(base.out);
    CHECK(std::stod(rows[2][2]) == doc.at("per_seed")[0].at("accuracy").get<double>());
    CHECK(std::stod(rows[5][2]) == doc.at("per_seed")[1].at("accuracy").get<double>());
    CHECK(rows[2][4] == "4");
  }
  SECTION("written to --out") {
    const auto out = ws.path("sweep.csv");
    REQUIRE(cli({"sweep", "--config", ws.config(toy_config("atp")), "--taus", "0.6,0,0.3",
                 "--seeds", "1,2", "--out", out})
                .code == 0);
    CHECK(app::read_file(out) == r.out);
  }
}

TEST_CASE("optimize", "[cli]") {
  Workspace ws;
  const auto out = ws.path("opt.json");
  REQUIRE(cli({"optimize", "--config", ws.config(toy_config("atp")), "--out", out}).code == 0);
  const Json doc = read_json(out);
  CHECK(doc.at("command") == "optimize");
  const auto& rec = doc.at("per_seed")[0];
  const double tau = rec.at("tau_star").get<double>();
  CHECK(tau >= 0.0);
  CHECK(tau <= 1.0);

  std::istringstream trace(app::read_file(ws.path("opt.trace.jsonl")));
  std::string line;
  std::size_t lines = 0;
  double best_in_trace = 0.0;
  while (std::getline(trace, line)) {
    const Json row = Json::parse(line);
    CHECK(row.at("index") == lines);
    CHECK(row.at("tau").get<double>() >= 0.0);
    CHECK(row.at("tau").get<double>() <= 1.0);
    best_in_trace = std::max(best_in_trace, row.at("accuracy").get<double>());
    ++lines;
  }
  CHECK(lines == rec.at("evaluations").get<std::size_t>());
  CHECK(rec.at("best_accuracy").get<double>() == best_in_trace);

  // The grid fallback visits at least the 5 coarse points, so the optimum can
  // only match or beat a manual sweep over them.
  const auto sweep = cli({"sweep", "--config", ws.config(toy_config("atp")), "--taus",
                          "0,0.25,0.5,0.75,1"});
  REQUIRE(sweep.code == 0);
  const auto rows = csv_rows(sweep.out);
  double sweep_best = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) sweep_best = std::max(sweep_best, std::stod(rows[i][2]));
  if (rec.at("used_fallback").get<bool>()) {
    CHECK(rec.at("best_accuracy").get<double>() >= sweep_best);
  }
}

TEST_CASE("table", "[cli]") {
  Workspace ws;
  auto result = [&](const std::string& name, const std::string& encoder, std::pair<int, int> pair,
                    double acc, double ent, int grid = 2) {
    Json cfg = toy_config(encoder);
    cfg["dataset"]["class_pair"] = {pair.first, pair.second};
    cfg["grid"] = grid;
    const Json doc = {{"schema_version", 1},
                      {"command", "run"},
                      {"config", cfg},
                      {"aggregate",
                       {{"accuracy", {{"mean", acc}, {"stddev", 0.0}}},
                        {"entropy", {{"mean", ent}, {"stddev", 0.0}}}}},
                      {"per_seed", Json::array()}};
    write_json(ws.path(name), doc);
    return ws.path(name);
  };

  SECTION("single cell") {
    const auto f = result("a.json", "angle", {0, 1}, 0.96, 0.67);
    const auto r = cli({"table", f, "--out", ws.path("t.csv")});
    REQUIRE(r.code == 0);
    CHECK(app::read_file(ws.path("t.csv")) == "class_pair,angle\n0-1,0.96\n");
    CHECK(r.out.find("0.9600") != std::string::npos);
    const auto e = cli({"table", f, "--entropy"});
    REQUIRE(e.code == 0);
    CHECK(e.out.find("0.6700") != std::string::npos);
  }
  SECTION("two by two from a glob") {
    result("r1.json", "angle", {0, 1}, 0.9, 0.6);
    result("r2.json", "atp", {0, 1}, 0.95, 0.4);
    result("r3.json", "angle", {3, 5}, 0.8, 0.7);
    result("r4.json", "atp", {3, 5}, 0.85, 0.5);
    std::ofstream(ws.path("r5.json")) << R"({"kind": "model", "schema_version": 1})";
    const auto r = cli({"table", ws.path("r*.json"), "--out", ws.path("t.csv")});
    REQUIRE(r.code == 0);
    CHECK(app::read_file(ws.path("t.csv")) == "class_pair,angle,atp\n0-1,0.9,0.95\n3-5,0.8,0.85\n");
  }
  SECTION("missing cells are blank") {
    result("m1.json", "angle", {0, 1}, 0.9, 0.6);
    result("m2.json", "sqe", {2, 3}, 0.7, 0.6);
    REQUIRE(cli({"table", ws.path("m*.json"), "--out", ws.path("t.csv")}).code == 0);
    CHECK(app::read_file(ws.path("t.csv")) == "class_pair,angle,sqe\n0-1,0.9,\n2-3,,0.7\n");
  }
  SECTION("incompatible inputs") {
    const auto a = result("g2.json", "angle", {0, 1}, 0.9, 0.6, 2);
    const auto b = result("g3.json", "atp", {0, 1}, 0.9, 0.6, 3);
    CHECK(cli({"table", a, b}).code == 2);
    const auto c = result("dup.json", "angle", {0, 1}, 0.8, 0.6, 2);
    CHECK(cli({"table", a, c}).code == 2);
    CHECK(cli({"table", ws.path("none*.json")}).code == 2);
    std::ofstream(ws.path("junk.json")) << "[1, 2]";
    CHECK(cli({"table", ws.path("junk.json")}).code == 3);
  }
}

TEST_CASE("attack and noise on a saved model", "[cli]") {
  Workspace ws;
  Json cfg = toy_config();
  cfg["noise"] = {{"p", {0.0, 0.1}}, {"trajectories", 20}};
  cfg["attack"] = {{"epsilon", 0.0}};
  const auto config = ws.config(cfg);
  REQUIRE(cli({"run", "--config", config, "--out", ws.path("m.json")}).code == 0);
  const Json run = read_json(ws.path("m.json"));
  const double clean = run.at("per_seed")[0].at("accuracy").get<double>();
  const auto model = ws.path("m.seed1.model.json");

  const auto a = cli({"attack", "--config", config, "--model", model});
  REQUIRE(a.code == 0);
  const Json att = Json::parse(a.out);
  CHECK(att.at("command") == "attack");
  CHECK(att.at("clean_accuracy").get<double>() == clean);
  CHECK(att.at("accuracy").get<double>() == clean);
  CHECK(run.at("per_seed")[0].at("attack").at("accuracy").get<double>() == clean);

  const auto n = cli({"noise", "--config", config, "--model", model, "--out", ws.path("n.json")});
  REQUIRE(n.code == 0);
  const Json noise = read_json(ws.path("n.json"));
  CHECK(noise.at("noise")[0].at("accuracy").get<double>() == clean);
  CHECK(noise.at("noise") == run.at("per_seed")[0].at("noise"));

  SECTION("model from a different grid is refused") {
    Json other = cfg;
    other["grid"] = 1;
    CHECK(cli({"noise", "--config", ws.config(other, "other.json"), "--model", model}).code == 2);
  }
  SECTION("no model given") {
    CHECK(cli({"attack", "--config", config}).code == 2);
  }
  SECTION("corrupt model file") {
    std::ofstream(ws.path("bad.model.json")) << R"({"kind": "model"})";
    CHECK(cli({"attack", "--config", config, "--model", ws.path("bad.model.json")}).code == 3);
  }
}
