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

#include "edgesub/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "edgesub/errors.hpp"
#include "edgesub/geometry.hpp"
#include "edgesub/io.hpp"
#include "edgesub/model.hpp"
#include "edgesub/parallel.hpp"
#include "edgesub/poset.hpp"
#include "edgesub/skeleton.hpp"
#include "edgesub/subdivide.hpp"
#include "edgesub/validate.hpp"

namespace edgesub {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Reads a JSON object as CLI11 config. Nested objects name subcommands; flat
// keys belong to `section`, the subcommand found on the command line.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string section) : section_(std::move(section)) {}

  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    Json j = Json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const auto& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        j[name] = res.size() == 1 ? Json(res.front()) : Json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      Json nested = Json::parse(to_config(sub, default_also, false, ""));
      if (!nested.empty()) j[sub->get_name()] = nested;
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json j;
    try {
      j = Json::parse(input);
    } catch (const Json::parse_error& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        for (auto sub = it->begin(); sub != it->end(); ++sub)
          items.push_back(item({it.key()}, sub.key(), *sub));
      } else {
        items.push_back(item(section_.empty() ? std::vector<std::string>{}
                                              : std::vector<std::string>{section_},
                             it.key(), *it));
      }
    }
    return items;
  }

 private:
  static std::string scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("unsupported config value " + v.dump());
  }

  static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& name,
                              const Json& v) {
    CLI::ConfigItem out;
    out.parents = std::move(parents);
    out.name = name;
    if (v.is_array()) {
      for (const auto& e : v) out.inputs.push_back(scalar(e));
    } else {
      out.inputs.push_back(scalar(v));
    }
    return out;
  }

  std::string section_;
};

struct RunConfig {
  std::string model_path;
  std::string random_spec;
  std::uint64_t seed = 0;
  std::string domain = "cube";
  double lo = -1.0;
  double hi = 1.0;
  double scale = 1.0;
  bool include_output = false;
  std::size_t output_index = 0;
  bool level_set_prune = false;
  bool center_level_set = false;
  bool inside_positive = false;
  bool interpolate_hidden = false;
  bool check_invariants = false;
  std::string out = ".";
  bool stats = false;
  unsigned threads = 0;
};

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    try {
      std::size_t used = 0;
      if (dots != std::string::npos) {
        const std::size_t a = std::stoul(part.substr(0, dots));
        const std::size_t b = std::stoul(part.substr(dots + 2), &used);
        if (used != part.size() - dots - 2 || b < a) throw std::invalid_argument(part);
        for (std::size_t v = a; v <= b; ++v) out.push_back(v);
      } else {
        const long long v = std::stoll(part, &used);
        if (used != part.size() || v < 0) throw std::invalid_argument(part);
        out.push_back(static_cast<std::size_t>(v));
      }
    } catch (const std::logic_error&) {
      throw InputError(std::string("bad ") + what + " list: '" + text + "'");
    }
  }
  if (out.empty()) throw InputError(std::string("empty ") + what + " list");
  return out;
}

MlpSpec build_model(const RunConfig& cfg) {
  if (cfg.model_path.empty() == cfg.random_spec.empty())
    throw InputError("exactly one of --model and --random is required");
  if (!cfg.model_path.empty()) return load_model(cfg.model_path);
  const auto spec = parse_size_list(cfg.random_spec, "--random");
  if (spec.size() != 4) throw InputError("--random expects in_dim,depth,width,out_dim");
  for (auto v : spec)
    if (v == 0) throw InputError("--random sizes must be >= 1");
  return random_model(spec[0], spec[1], spec[2], spec[3], cfg.seed);
}

InitialComplex build_domain(const RunConfig& cfg, std::size_t dim) {
  if (cfg.domain == "cube") {
    if (!(cfg.lo < cfg.hi)) throw InputError("--lo must be below --hi");
    return init_hypercube(dim, cfg.lo, cfg.hi);
  }
  if (cfg.domain == "simplex") {
    if (!(cfg.scale > 0)) throw InputError("--scale must be positive");
    return init_simplex(dim, cfg.scale);
  }
  throw InputError("unknown --domain '" + cfg.domain + "' (cube|simplex)");
}

struct Prepared {
  MlpSpec model;
  InitialComplex initial;
  NeuronSchedule schedule;
  ExtractOptions opts;
};

Prepared prepare(const RunConfig& cfg, bool force_output) {
  Prepared p;
  p.model = build_model(cfg);
  p.initial = build_domain(cfg, p.model.in_dim);
  const bool with_output = cfg.include_output || force_output;
  if (with_output && cfg.output_index >= p.model.out_dim())
    throw InputError("--output-index out of range");
  if (cfg.level_set_prune && !with_output)
    throw InputError("--level-set-prune requires --include-output");
  if (cfg.center_level_set) {
    const auto& d = p.initial.domain;
    std::vector<double> center(d.dim);
    for (std::size_t k = 0; k < d.dim; ++k) center[k] = 0.5 * (d.box_lo[k] + d.box_hi[k]);
    const auto f = evaluate(p.model, center);
    p.model.layers.back().bias[cfg.output_index] -= f[cfg.output_index];
  }
  p.schedule = NeuronSchedule::for_model(p.model, with_output);
  p.opts.level_set_prune = cfg.level_set_prune;
  p.opts.interpolate_hidden = cfg.interpolate_hidden;
  p.opts.check_invariants = cfg.check_invariants;
  p.opts.threads = resolve_threads(cfg.threads);
  return p;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json residual_json(const ResidualReport& r) {
  Json j;
  j["max_abs"] = r.max_abs;
  j["mean_abs"] = r.mean_abs;
  j["relative"] = r.relative();
  j["max_facet"] = r.max_facet;
  j["max_per_layer"] = r.max_per_layer;
  j["extent"] = r.extent;
  j["samples"] = r.samples;
  return j;
}

Json stats_json(const ExtractResult& res) {
  Json prunes = Json::array();
  for (const auto& p : res.prunes) {
    prunes.push_back({{"after_layer", p.after_layer},
                      {"vertices_before", p.vertices_before},
                      {"edges_before", p.edges_before},
                      {"vertices_pruned", p.vertices_pruned},
                      {"edges_pruned", p.edges_pruned}});
  }
  return prunes;
}

void write_stats(const fs::path& dir, const ExtractResult& res) {
  std::string text;
  for (const auto& s : res.iterations) text += iteration_json_line(s);
  write_text(dir / "stats.jsonl", text);
}

int cmd_extract(const RunConfig& cfg) {
  auto p = prepare(cfg, false);
  const auto res = extract_complex(p.model, p.initial, p.schedule, p.opts);
  const fs::path dir(cfg.out);
  export_csv(res.skeleton, dir);
  const auto rep = residuals(res.skeleton, p.model, p.initial.domain, p.schedule);
  Json j;
  j["schema"] = kSchemaVersion;
  j["D"] = res.skeleton.dim;
  j["m"] = res.skeleton.m;
  j["t"] = res.skeleton.t;
  j["domain"] = to_string(p.initial.domain.kind);
  j["vertices"] = res.skeleton.vertex_count();
  j["edges"] = res.skeleton.edge_count();
  j["degenerate"] = res.degenerate;
  j["edges_processed"] = res.edges_processed();
  j["residual"] = residual_json(rep);
  j["prunes"] = stats_json(res);
  j["peak_memory_bytes"] = res.peak_memory_bytes;
  j["timings"] = {{"total_seconds", res.seconds}};
  write_json(dir / "summary.json", j);
  if (cfg.stats) write_stats(dir, res);
  std::cout << "vertices " << res.skeleton.vertex_count() << " edges "
            << res.skeleton.edge_count() << "\n";
  return kExitOk;
}

int cmd_count(const RunConfig& cfg, std::optional<std::size_t> up_to) {
  auto p = prepare(cfg, false);
  const auto res = extract_complex(p.model, p.initial, p.schedule, p.opts);
  const std::size_t dim = res.skeleton.dim;
  const std::size_t k = up_to.value_or(dim);
  if (k > dim) throw InputError("--up-to exceeds the input dimension");
  const auto counts = count_cells(res.skeleton, res.skeleton.m, k);
  Json j;
  j["dims"] = counts.dims;
  if (k == dim) {
    j["euler"] = counts.euler();
    j["regions"] = counts.dims.back();
  }
  write_json(fs::path(cfg.out) / "counts.json", j);
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_boundary(const RunConfig& cfg) {
  auto p = prepare(cfg, true);
  const std::size_t dim = p.model.in_dim;
  if (dim != 2 && dim != 3) throw InputError("boundary supports D = 2 or D = 3");
  const auto res = extract_complex(p.model, p.initial, p.schedule, p.opts);
  const std::size_t out = output_entry(p.model, p.schedule, res.skeleton.m, cfg.output_index);
  auto mesh = boundary_subcomplex(res.skeleton, out);
  if (mesh.vertex_count() == 0) throw EmptyResultError("empty level set");
  const fs::path dir(cfg.out);
  Json j;
  j["schema"] = kSchemaVersion;
  j["D"] = dim;
  j["vertices"] = mesh.vertex_count();
  j["edges"] = mesh.edge_count();
  if (dim == 2) {
    const bool inside_negative = !cfg.inside_positive;
    const auto metrics = area_perimeter_2d(res.skeleton, out, res.skeleton.m, inside_negative);
    j["area"] = metrics.area;
    j["perimeter"] = metrics.perimeter;
    j["compactness"] = metrics.compactness;
    j["area_from_boundary"] = inside_area_from_boundary_2d(
        res.skeleton, p.model, p.initial.domain, out, cfg.output_index, inside_negative);
    export_svg(res.skeleton, p.initial.domain, out, dir / "boundary.svg");
  } else {
    mesh = assemble_faces(std::move(mesh), p.model, cfg.output_index);
    j["faces"] = mesh.faces.size();
    export_obj(mesh, dir / "boundary.obj");
  }
  write_json(dir / "metrics.json", j);
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_prune_model(const RunConfig& cfg) {
  auto p = prepare(cfg, true);
  const auto res = extract_complex(p.model, p.initial, p.schedule, p.opts);
  const std::size_t out = output_entry(p.model, p.schedule, res.skeleton.m, cfg.output_index);
  const auto mesh = boundary_subcomplex(res.skeleton, out);
  if (mesh.vertex_count() == 0) throw EmptyResultError("empty level set");
  const auto labels = classify_neurons_on_boundary(p.model, mesh.positions);
  const auto pruned = prune_stably_negative(p.model, labels);
  const fs::path dir(cfg.out);
  save_model(pruned, dir / "pruned_model.json");
  Json layers = Json::array();
  std::size_t removed = 0;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    Json names = Json::array();
    for (auto label : labels[l]) {
      names.push_back(to_string(label));
      removed += label == NeuronLabel::kStablyNegative;
    }
    layers.push_back({{"layer", l + 1}, {"labels", names}});
  }
  Json j;
  j["schema"] = kSchemaVersion;
  j["boundary_vertices"] = mesh.vertex_count();
  j["widths_before"] = p.model.widths();
  j["widths_after"] = pruned.widths();
  j["parameters_before"] = p.model.parameter_count();
  j["parameters_after"] = pruned.parameter_count();
  j["neurons_removed"] = removed;
  j["layers"] = layers;
  write_json(dir / "pruning_report.json", j);
  std::cout << "parameters " << p.model.parameter_count() << " -> " << pruned.parameter_count()
            << "\n";
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::size_t samples, double tol) {
  auto p = prepare(cfg, false);
  const auto res = extract_complex(p.model, p.initial, p.schedule, p.opts);
  const auto& sk = res.skeleton;
  const auto& domain = p.initial.domain;
  const auto rep = residuals(sk, p.model, domain, p.schedule);
  const auto mid = midpoint_check(sk, p.model, domain, p.schedule, tol);
  const auto counts = count_cells(sk, sk.m, sk.dim);
  bool ok = rep.relative() <= 1e-7 && mid.failed == 0 && counts.euler() == 1;

  Json j;
  j["schema"] = kSchemaVersion;
  j["D"] = sk.dim;
  j["vertices"] = sk.vertex_count();
  j["edges"] = sk.edge_count();
  j["degenerate"] = res.degenerate;
  j["residual"] = residual_json(rep);
  j["midpoint"] = {{"tol", tol}, {"passed", mid.passed}, {"failed", mid.failed},
                   {"failures", mid.failures}};
  j["cells"] = {{"dims", counts.dims}, {"euler", counts.euler()}};
  if (!p.schedule.include_output && samples > 0) {
    const auto sampled = sampled_region_oracle(p.model, domain, p.schedule, samples, cfg.seed,
                                               p.opts.threads);
    const auto regions = region_signatures(sk, sk.m);
    const auto cmp = compare_regions(sampled, regions);
    ok = ok && cmp.subset();
    j["regions"] = {{"samples", samples},
                    {"sampled", cmp.sampled},
                    {"extracted", cmp.extracted},
                    {"not_extracted", cmp.not_extracted},
                    {"coverage", cmp.coverage}};
  }
  const bool single_layer = p.schedule.size() == p.model.layers.front().rows &&
                            std::all_of(p.schedule.order.begin(), p.schedule.order.end(),
                                        [](const NeuronRef& n) { return n.layer == 1; });
  if (single_layer) {
    const auto oracle = oracle_single_layer_vertices(p.model, domain);
    const auto cmp = compare_vertex_sets(sk, oracle);
    ok = ok && cmp.equal(1e-8);
    j["oracle"] = {{"extracted", cmp.extracted},
                   {"oracle", cmp.oracle},
                   {"unmatched", cmp.unmatched},
                   {"max_coord_diff", cmp.max_coord_diff},
                   {"singular", oracle.singular},
                   {"degenerate", oracle.degenerate}};
  }
  j["passed"] = ok;
  write_json(fs::path(cfg.out) / "validation.json", j);
  std::cout << (ok ? "validation passed" : "validation FAILED") << "\n";
  return ok ? kExitOk : kExitInvariantViolation;
}

struct BenchConfig {
  std::string dims = "1..3";
  std::string widths = "10,20";
  std::size_t depth = 4;
  std::size_t seeds = 2;
};

int cmd_bench(const RunConfig& cfg, const BenchConfig& bench) {
  const auto dims = parse_size_list(bench.dims, "--dims");
  const auto widths = parse_size_list(bench.widths, "--widths");
  if (bench.depth == 0 || bench.seeds == 0) throw InputError("--depth and --seeds must be >= 1");
  std::string csv =
      "dim,width,depth,seed,vertices,edges,edges_processed,seconds,peak_memory_bytes\n";
  std::map<std::size_t, std::vector<std::vector<IterationStats>>> runs;
  for (auto dim : dims) {
    if (dim == 0) throw InputError("--dims entries must be >= 1");
    for (auto width : widths) {
      if (width == 0) throw InputError("--widths entries must be >= 1");
      for (std::size_t s = 0; s < bench.seeds; ++s) {
        RunConfig run = cfg;
        run.model_path.clear();
        run.random_spec = std::to_string(dim) + "," + std::to_string(bench.depth) + "," +
                          std::to_string(width) + ",1";
        run.seed = cfg.seed + s;
        auto p = prepare(run, false);
        const auto res = extract_complex(p.model, p.initial, p.schedule, p.opts);
        csv += std::to_string(dim) + "," + std::to_string(width) + "," +
               std::to_string(bench.depth) + "," + std::to_string(run.seed) + "," +
               std::to_string(res.skeleton.vertex_count()) + "," +
               std::to_string(res.skeleton.edge_count()) + "," +
               std::to_string(res.edges_processed()) + "," + format_double(res.seconds) + "," +
               std::to_string(res.peak_memory_bytes) + "\n";
        runs[dim].push_back(res.iterations);
      }
    }
  }
  const fs::path dir(cfg.out);
  write_text(dir / "bench.csv", csv);
  Json scaling = Json::array();
  for (const auto& [dim, list] : runs) {
    Json entry = {{"dim", dim}};
    try {
      const auto fit = scaling_report(list);
      entry["slope"] = fit.slope;
      entry["rms_residual"] = fit.rms_residual;
      entry["decades"] = fit.decades;
      entry["runs"] = fit.runs;
      std::cout << "D=" << dim << " slope " << format_double(fit.slope) << " over "
                << format_double(fit.decades) << " decades\n";
    } catch (const InputError& e) {
      entry["slope"] = nullptr;
      entry["note"] = e.what();
    }
    scaling.push_back(entry);
  }
  write_json(dir / "scaling.json", {{"schema", kSchemaVersion}, {"fits", scaling}});
  return kExitOk;
}

void add_model_options(CLI::App* sub, RunConfig& cfg) {
  auto* model = sub->add_option("--model", cfg.model_path, "model JSON file");
  auto* random = sub->add_option("--random", cfg.random_spec, "random net: in_dim,depth,width,out_dim");
  model->excludes(random);
  sub->add_option("--seed", cfg.seed, "seed for --random and sampling");
  sub->add_option("--domain", cfg.domain, "cube|simplex")->capture_default_str();
  sub->add_option("--lo", cfg.lo, "cube lower bound")->capture_default_str();
  sub->add_option("--hi", cfg.hi, "cube upper bound")->capture_default_str();
  sub->add_option("--scale", cfg.scale, "simplex scale")->capture_default_str();
  sub->add_flag("--include-output", cfg.include_output, "subdivide by the output neurons too");
  sub->add_option("--output-index", cfg.output_index, "output neuron of the level set");
  sub->add_flag("--level-set-prune", cfg.level_set_prune, "prune edges off the level set");
  sub->add_flag("--center-level-set", cfg.center_level_set,
                "shift the output bias so f(domain center) = 0");
  sub->add_flag("--inside-positive", cfg.inside_positive, "inside is positive output");
  sub->add_flag("--interpolate-hidden", cfg.interpolate_hidden,
                "interpolate cached activations for new vertices");
  sub->add_flag("--check-invariants", cfg.check_invariants, "check the skeleton every iteration");
  sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
  sub->add_flag("--stats", cfg.stats, "write stats.jsonl");
  sub->add_option("--threads", cfg.threads, "worker threads (0 = all)");
}

std::string version_text() {
  std::ostringstream os;
  os << "edgesub " << kVersion << "\n"
     << "model schema " << kSchemaVersion << "\n"
     << "summary schema " << kSchemaVersion << "\n"
     << "stats schema " << kSchemaVersion << "\n"
     << "counts schema " << kSchemaVersion << "\n";
  return os.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Exact polyhedral complexes of ReLU networks by edge subdivision"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", version_text());

  std::string section;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "extract" || a == "count" || a == "boundary" || a == "prune-model" ||
        a == "validate" || a == "bench") {
      section = a;
      break;
    }
  }
  app.set_config("--config", "", "JSON file mirroring the command-line flags");
  app.config_formatter(std::make_shared<JsonConfig>(section));

  RunConfig cfg;
  auto* extract = app.add_subcommand("extract", "write the 1-skeleton and a summary");
  add_model_options(extract, cfg);

  auto* count = app.add_subcommand("count", "count cells of every dimension");
  add_model_options(count, cfg);
  std::size_t up_to = 0;
  auto* up_to_opt = count->add_option("--up-to", up_to, "highest cell dimension (default D)");

  auto* boundary = app.add_subcommand("boundary", "extract the output zero level set");
  add_model_options(boundary, cfg);

  auto* prune = app.add_subcommand("prune-model", "remove neurons inactive on the level set");
  add_model_options(prune, cfg);

  auto* validate = app.add_subcommand("validate", "residual, midpoint and oracle checks");
  add_model_options(validate, cfg);
  std::size_t samples = 100000;
  double tol = 1e-8;
  validate->add_option("--samples", samples, "sampled region oracle size")->capture_default_str();
  validate->add_option("--tol", tol, "midpoint tolerance")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "timed runs over random nets");
  add_model_options(bench, cfg);
  BenchConfig bcfg;
  bench->add_option("--dims", bcfg.dims, "input dimensions, e.g. 1..3")->capture_default_str();
  bench->add_option("--widths", bcfg.widths, "widths, e.g. 10,20")->capture_default_str();
  bench->add_option("--depth", bcfg.depth, "hidden layers")->capture_default_str();
  bench->add_option("--seeds", bcfg.seeds, "seeds per configuration")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*extract) return cmd_extract(cfg);
    if (*count)
      return cmd_count(cfg, up_to_opt->count() ? std::optional<std::size_t>(up_to) : std::nullopt);
    if (*boundary) return cmd_boundary(cfg);
    if (*prune) return cmd_prune_model(cfg);
    if (*validate) return cmd_validate(cfg, samples, tol);
    if (*bench) return cmd_bench(cfg, bcfg);
  } catch (const EmptyResultError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEmptyResult;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariantViolation;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariantViolation;
  }
  return kExitInputError;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("edgesub");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace edgesub
