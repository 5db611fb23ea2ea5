// Copyright 2026 The edgesub Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <numbers>

#include "edgesub/cli.hpp"
#include "edgesub/io.hpp"
#include "edgesub/model.hpp"
#include "helpers.hpp"

using namespace edgesub;
using edgesub::testing::layer;
using edgesub::testing::read_file;
using edgesub::testing::temp_dir;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

std::string model_file(const fs::path& dir, const MlpSpec& m, const std::string& name) {
  save_model(m, dir / name);
  return (dir / name).string();
}

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("extract smoke run") {
  const auto dir = temp_dir("cli_extract");
  CHECK(run_cli({"extract", "--random", "2,4,10,1", "--seed", "0", "--domain", "cube", "--lo",
                 "-1", "--hi", "1", "--out", dir.string(), "--stats"}) == kExitOk);
  for (const char* f : {"vertices.csv", "edges.csv", "summary.json", "stats.jsonl"})
    CHECK(fs::exists(dir / f));
  const auto summary = read_json(dir / "summary.json");
  CHECK(summary["D"] == 2);
  CHECK(summary["m"] == 4);
  CHECK(summary["t"] == 40);
  CHECK(summary["vertices"].get<std::size_t>() + 1 == lines(read_file(dir / "vertices.csv")));
  CHECK(summary["edges"].get<std::size_t>() + 1 == lines(read_file(dir / "edges.csv")));
  CHECK(summary["residual"]["relative"].get<double>() <= 1e-7);
  CHECK(lines(read_file(dir / "stats.jsonl")) == 40);
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  const auto a = temp_dir("cli_det_a"), b = temp_dir("cli_det_b");
  const std::vector<std::string> base{"extract", "--random", "3,3,8,1", "--seed", "5"};
  auto with = [&](const fs::path& dir, const char* threads) {
    auto args = base;
    args.insert(args.end(), {"--out", dir.string(), "--threads", threads});
    return run_cli(args);
  };
  REQUIRE(with(a, "1") == kExitOk);
  REQUIRE(with(b, "3") == kExitOk);
  CHECK(read_file(a / "vertices.csv") == read_file(b / "vertices.csv"));
  CHECK(read_file(a / "edges.csv") == read_file(b / "edges.csv"));
  auto sa = read_json(a / "summary.json"), sb = read_json(b / "summary.json");
  sa.erase("timings");
  sb.erase("timings");
  CHECK(sa == sb);
}

TEST_CASE("input errors exit with 2") {
  const auto dir = temp_dir("cli_err");
  write_text(dir / "bad.json", R"({"in_dim": 1, "layers": [{"weights": [["NaN"]], "bias": [0]}]})");
  CHECK(run_cli({"extract", "--model", (dir / "bad.json").string(), "--out", dir.string()}) ==
        kExitInputError);
  CHECK(run_cli({"extract", "--model", (dir / "missing.json").string()}) == kExitInputError);
  CHECK(run_cli({"extract", "--out", dir.string()}) == kExitInputError);
  CHECK(run_cli({"extract", "--random", "2,1,3"}) == kExitInputError);
  CHECK(run_cli({"extract", "--random", "2,1,3,1", "--model", "x.json"}) == kExitInputError);
  CHECK(run_cli({"extract", "--random", "2,1,3,1", "--domain", "ball"}) == kExitInputError);
  CHECK(run_cli({"extract", "--random", "2,1,3,1", "--level-set-prune"}) == kExitInputError);
  CHECK(run_cli({"frobnicate"}) == kExitInputError);
  CHECK(run_cli({}) == kExitInputError);
  CHECK(run_cli({"--version"}) == kExitOk);
}

TEST_CASE("count") {
  const auto dir = temp_dir("cli_count");
  const auto line = model_file(dir, edgesub::testing::line_model(), "line.json");
  MlpSpec missing = edgesub::testing::line_model();
  missing.layers[0].bias[0] = 10;
  const auto none = model_file(dir, missing, "none.json");
  REQUIRE(run_cli({"count", "--model", line, "--lo", "0", "--hi", "1", "--out", dir.string()}) ==
          kExitOk);
  auto c = read_json(dir / "counts.json");
  CHECK(c["dims"] == json({6, 7, 2}));
  CHECK(c["euler"] == 1);
  CHECK(c["regions"] == 2);
  REQUIRE(run_cli({"count", "--model", none, "--lo", "0", "--hi", "1", "--out", dir.string()}) ==
          kExitOk);
  c = read_json(dir / "counts.json");
  CHECK(c["dims"] == json({4, 4, 1}));
  CHECK(c["euler"] == 1);
  REQUIRE(run_cli({"count", "--model", line, "--up-to", "1", "--out", dir.string()}) == kExitOk);
  CHECK(read_json(dir / "counts.json")["dims"].size() == 2);
  CHECK(run_cli({"count", "--model", line, "--up-to", "3"}) == kExitInputError);
}

TEST_CASE("boundary") {
  const auto dir = temp_dir("cli_boundary");
  const auto diamond = model_file(dir, edgesub::testing::diamond_model(), "diamond.json");
  REQUIRE(run_cli({"boundary", "--model", diamond, "--lo", "-2", "--hi", "2", "--out",
                   (dir / "d").string()}) == kExitOk);
  const auto metrics = read_json(dir / "d" / "metrics.json");
  CHECK(std::abs(metrics["compactness"].get<double>() - std::numbers::pi / 4) <= 1e-12);
  CHECK(std::abs(metrics["area"].get<double>() - 2) <= 1e-12);
  CHECK(fs::exists(dir / "d" / "boundary.svg"));

  CHECK(run_cli({"boundary", "--model", diamond, "--lo", "5", "--hi", "6", "--out",
                 (dir / "e").string()}) == kExitEmptyResult);

  const auto plane = model_file(dir, edgesub::testing::plane_model(), "plane.json");
  REQUIRE(run_cli({"boundary", "--model", plane, "--out", (dir / "p").string()}) == kExitOk);
  const auto obj = read_file(dir / "p" / "boundary.obj");
  CHECK(obj.find("\nf ") != std::string::npos);
  CHECK(obj.find("\nf ") == obj.rfind("\nf "));
  CHECK(read_json(dir / "p" / "metrics.json")["faces"] == 1);

  CHECK(run_cli({"boundary", "--random", "4,1,3,1", "--center-level-set"}) == kExitInputError);
}

TEST_CASE("prune-model") {
  const auto dir = temp_dir("cli_prune");
  const auto diamond_spec = edgesub::testing::diamond_model();
  const auto diamond = model_file(dir, diamond_spec, "diamond.json");
  REQUIRE(run_cli({"prune-model", "--model", diamond, "--lo", "-2", "--hi", "2", "--out",
                   (dir / "a").string()}) == kExitOk);
  CHECK(load_model(dir / "a" / "pruned_model.json") == diamond_spec);
  const auto report = read_json(dir / "a" / "pruning_report.json");
  CHECK(report["neurons_removed"] == 0);
  CHECK(report["layers"][0]["labels"] ==
        json({"intersecting", "stably_positive", "intersecting", "stably_positive"}));

  // Add relu(x - 10), never active on [-2, 2]^2.
  MlpSpec dead = diamond_spec;
  auto& l1 = dead.layers[0];
  l1.rows = 5;
  l1.weights.insert(l1.weights.end(), {1, 0});
  l1.bias.push_back(-10);
  auto& l2 = dead.layers[1];
  l2.cols = 5;
  l2.weights.push_back(7);
  const auto dead_path = model_file(dir, dead, "dead.json");
  REQUIRE(run_cli({"prune-model", "--model", dead_path, "--lo", "-2", "--hi", "2",
                   "--level-set-prune", "--out", (dir / "b").string()}) == kExitOk);
  const auto pruned = load_model(dir / "b" / "pruned_model.json");
  CHECK(pruned.widths() == std::vector<std::size_t>{2, 4, 1});
  CHECK(pruned == diamond_spec);
  const auto r = read_json(dir / "b" / "pruning_report.json");
  CHECK(r["parameters_before"].get<std::size_t>() - r["parameters_after"].get<std::size_t>() ==
        2 + 1 + 1);
}

TEST_CASE("validate") {
  const auto dir = temp_dir("cli_validate");
  CHECK(run_cli({"validate", "--random", "2,4,10,1", "--samples", "20000", "--out",
                 dir.string()}) == kExitOk);
  const auto v = read_json(dir / "validation.json");
  CHECK(v["passed"] == true);
  CHECK(v["midpoint"]["failed"] == 0);
  CHECK(v["cells"]["euler"] == 1);
  CHECK(v["regions"]["not_extracted"] == 0);
  CHECK(run_cli({"validate", "--random", "3,1,8,1", "--seed", "2", "--out", dir.string()}) ==
        kExitOk);
  const auto o = read_json(dir / "validation.json");
  CHECK(o["oracle"]["unmatched"] == 0);
  CHECK(o["oracle"]["extracted"] == o["oracle"]["oracle"]);
}

TEST_CASE("bench") {
  const auto dir = temp_dir("cli_bench");
  REQUIRE(run_cli({"bench", "--dims", "1..2", "--widths", "4,6", "--depth", "2", "--seeds", "2",
                   "--out", dir.string()}) == kExitOk);
  CHECK(lines(read_file(dir / "bench.csv")) == 1 + 2 * 2 * 2);
  const auto s = read_json(dir / "scaling.json");
  CHECK(s["fits"].size() == 2);
  CHECK(run_cli({"bench", "--dims", "x", "--out", dir.string()}) == kExitInputError);
}

TEST_CASE("--config mirrors the flags") {
  const auto dir = temp_dir("cli_config");
  REQUIRE(run_cli({"extract", "--random", "2,3,6,1", "--seed", "4", "--lo", "-0.5", "--out",
                   (dir / "flags").string()}) == kExitOk);
  write_text(dir / "flat.json", json({{"random", "2,3,6,1"},
                                      {"seed", 4},
                                      {"lo", -0.5},
                                      {"out", (dir / "flat").string()}})
                                    .dump());
  REQUIRE(run_cli({"extract", "--config", (dir / "flat.json").string()}) == kExitOk);
  write_text(dir / "nested.json",
             json({{"extract", {{"random", "2,3,6,1"}, {"seed", 4}, {"lo", -0.5},
                                {"out", (dir / "nested").string()}}}})
                 .dump());
  REQUIRE(run_cli({"extract", "--config", (dir / "nested.json").string()}) == kExitOk);
  const auto ref = read_file(dir / "flags" / "vertices.csv");
  CHECK(read_file(dir / "flat" / "vertices.csv") == ref);
  CHECK(read_file(dir / "nested" / "vertices.csv") == ref);

  write_text(dir / "broken.json", "{");
  CHECK(run_cli({"extract", "--config", (dir / "broken.json").string()}) == kExitInputError);
}

TEST_CASE("the executable reports exit codes") {
  const auto dir = temp_dir("cli_exe");
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  const std::string exe = EDGESUB_CLI_PATH;
  CHECK(status(exe + " --version") == 0);
  CHECK(status(exe + " extract --random 2,2,4,1 --out " + dir.string()) == 0);
  CHECK(status(exe + " extract --model " + (dir / "nope.json").string()) == 2);
  const auto diamond = model_file(dir, edgesub::testing::diamond_model(), "diamond.json");
  CHECK(status(exe + " boundary --model " + diamond + " --lo 5 --hi 6 --out " + dir.string()) == 3);
}
