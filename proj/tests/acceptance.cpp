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

// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "edgesub/errors.hpp"
#include "edgesub/geometry.hpp"
#include "edgesub/io.hpp"
#include "edgesub/model.hpp"
#include "edgesub/poset.hpp"
#include "edgesub/skeleton.hpp"
#include "edgesub/subdivide.hpp"
#include "edgesub/validate.hpp"

using namespace edgesub;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::size_t g_pairing_violations = 0;
std::size_t g_extractions = 0;

// Extraction that records pairing failures instead of aborting the run.
std::optional<ExtractResult> extract(const MlpSpec& model, const InitialComplex& init,
                                     const NeuronSchedule& schedule, ExtractOptions opts = {}) {
  ++g_extractions;
  try {
    return extract_complex(model, init, schedule, opts);
  } catch (const PairingError& e) {
    ++g_pairing_violations;
    std::printf("  pairing violation: %s\n", e.what());
    return std::nullopt;
  }
}

MlpSpec centered(MlpSpec model, std::size_t d) {
  const std::vector<double> center(d, 0.0);
  model.layers.back().bias[0] -= evaluate(model, center)[0];
  return model;
}

struct NetRun {
  std::size_t dim;
  std::uint64_t seed;
  MlpSpec model;
  InitialComplex init;
  ExtractResult result;
};

// Nets of criterion 1 (depth 4, width 10, D in {2, 3, 4}, 5 seeds, [-1, 1]^D).
std::vector<NetRun> g_residual_nets;
std::vector<NetRun> g_oracle_nets;

Outcome criterion_residuals() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::size_t d : {2, 3, 4})
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto model = random_model(d, 4, 10, 1, seed);
      auto init = init_hypercube(d, -1, 1);
      auto res = extract(model, init, NeuronSchedule::for_model(model, false));
      if (!res) return {false, "extraction failed"};
      const auto rep = residuals(res->skeleton, model, init.domain, res->schedule);
      worst = std::max(worst, rep.relative());
      g_residual_nets.push_back({d, seed, std::move(model), std::move(init), std::move(*res)});
    }
  const double secs = since(start);
  const bool ok = worst <= 1e-7 && secs < 30.0;
  return {ok, "max residual / extent " + fmt(worst) + " (limit 1e-7), " + fmt(secs) +
                  " s (limit 30 s), 15 nets"};
}

Outcome criterion_oracle() {
  const auto start = Clock::now();
  std::size_t mismatches = 0, total = 0;
  double worst = 0.0;
  for (std::size_t d : {2, 3})
    for (std::size_t width : {4, 8})
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto model = random_model(d, 1, width, 1, seed);
        auto init = init_hypercube(d, -1, 1);
        auto res = extract(model, init, NeuronSchedule::first_layer(model));
        if (!res) return {false, "extraction failed"};
        const auto oracle = oracle_single_layer_vertices(model, init.domain);
        const auto cmp = compare_vertex_sets(res->skeleton, oracle);
        worst = std::max(worst, cmp.max_coord_diff);
        total += cmp.oracle;
        if (!cmp.equal(1e-8)) ++mismatches;
        g_oracle_nets.push_back({d, seed, std::move(model), std::move(init), std::move(*res)});
      }
  const double secs = since(start);
  return {mismatches == 0 && secs < 60.0,
          std::to_string(20 - mismatches) + "/20 nets equal, " + std::to_string(total) +
              " oracle vertices, max coordinate diff " + fmt(worst) + " (limit 1e-8), " +
              fmt(secs) + " s (limit 60 s)"};
}

Outcome criterion_euler() {
  std::size_t checked = 0, bad = 0;
  auto check = [&](const Skeleton& sk) {
    ++checked;
    if (count_cells(sk, sk.m, sk.dim).euler() != 1) ++bad;
  };
  for (const auto& n : g_residual_nets) check(n.result.skeleton);
  for (const auto& n : g_oracle_nets) check(n.result.skeleton);
  // D = 2 depth-4 width-10 nets, 5 seeds: the D = 2 subset of criterion 1 plus fresh seeds.
  for (std::uint64_t seed = 5; seed < 10; ++seed) {
    const auto model = random_model(2, 4, 10, 1, seed);
    const auto res = extract(model, init_hypercube(2, -1, 1), NeuronSchedule::for_model(model, false));
    if (!res) return {false, "extraction failed"};
    check(res->skeleton);
  }
  if (g_residual_nets.empty() || g_oracle_nets.empty()) return {false, "no nets from 1-2"};
  return {bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) +
                        " complexes with Euler characteristic 1"};
}

Outcome criterion_midpoint() {
  std::size_t passed = 0, failed = 0;
  for (const auto& n : g_residual_nets) {
    const auto r =
        midpoint_check(n.result.skeleton, n.model, n.init.domain, n.result.schedule, 1e-8);
    passed += r.passed;
    failed += r.failed;
  }
  if (g_residual_nets.empty()) return {false, "no nets from criterion 1"};
  return {failed == 0, std::to_string(passed) + "/" + std::to_string(passed + failed) +
                           " edges pass at tol 1e-8"};
}

// Area of a D = 2 region: the convex hull of the vertices compatible with its
// signature.
double region_area(const Skeleton& sk, const SignVector& region) {
  std::vector<std::array<double, 2>> pts;
  for (std::size_t v = 0; v < sk.vertex_slots(); ++v) {
    bool in = sk.vertex_alive[v];
    for (std::size_t j = 0; j < region.size() && in; ++j) {
      const Sign s = sk.vertex_signs.get(v, j);
      in = s == Sign::kZero || s == region[j];
    }
    if (in) pts.push_back({sk.position(v)[0], sk.position(v)[1]});
  }
  return convex_polygon_area(pts);
}

Outcome criterion_containment() {
  std::size_t not_extracted = 0;
  double min_cov = 1.0;
  double largest_missed = 0.0, tiling_error = 0.0;
  std::ostringstream detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto model = random_model(2, 4, 10, 1, seed);
    const auto init = init_hypercube(2, -1, 1);
    const auto res = extract(model, init, NeuronSchedule::for_model(model, false));
    if (!res) return {false, "extraction failed"};
    const auto regions = region_signatures(res->skeleton, res->skeleton.m);
    const auto sampled =
        sampled_region_oracle(model, init.domain, res->schedule, 1000000, 1000 + seed);
    const auto cmp = compare_regions(sampled, regions);
    not_extracted += cmp.not_extracted;
    min_cov = std::min(min_cov, cmp.coverage);
    double total_area = 0.0;
    for (const auto& r : regions) {
      const double a = region_area(res->skeleton, r);
      total_area += a;
      if (!std::binary_search(sampled.begin(), sampled.end(), r))
        largest_missed = std::max(largest_missed, a);
    }
    tiling_error = std::max(tiling_error, std::abs(total_area - 4.0));
    detail << (seed ? ", " : "") << cmp.sampled << "/" << cmp.extracted;
  }
  return {not_extracted == 0 && min_cov >= 0.99,
          "sampled/extracted regions " + detail.str() + "; " + std::to_string(not_extracted) +
              " sampled signatures missing; min coverage " + fmt(min_cov) +
              " (limit 0.99); largest unsampled region area " + fmt(largest_missed) +
              " (expected hits " + fmt(largest_missed / 4.0 * 1e6) +
              "); region areas sum to the domain area within " + fmt(tiling_error)};
}

Outcome criterion_pairing() {
  return {g_pairing_violations == 0 && g_extractions > 0,
          std::to_string(g_pairing_violations) + " multiplicity violations over " +
              std::to_string(g_extractions) + " extractions"};
}

Outcome criterion_compactness() {
  MlpSpec m;
  m.in_dim = 2;
  // f(x, y) = |x| + |y| - 1 with |x| = 2 relu(x) - relu(x + 3) + 3 on [-2, 2].
  m.layers = {LayerSpec{4, 2, {1, 0, 1, 0, 0, 1, 0, 1}, {0, 3, 0, 3}},
              LayerSpec{1, 4, {2, -1, 2, -1}, {5}}};
  const auto init = init_hypercube(2, -2, 2);
  const auto schedule = NeuronSchedule::for_model(m, true);
  const auto res = extract(m, init, schedule);
  if (!res) return {false, "extraction failed"};
  const auto metrics =
      area_perimeter_2d(res->skeleton, output_entry(m, schedule, res->skeleton.m), res->skeleton.m);
  const double da = std::abs(metrics.area - 2.0);
  const double dp = std::abs(metrics.perimeter - 4.0 * std::sqrt(2.0));
  const double dc = std::abs(metrics.compactness - std::numbers::pi / 4.0);
  const double circle = compactness(std::numbers::pi, 2.0 * std::numbers::pi);
  return {da <= 1e-12 && dp <= 1e-12 && dc <= 1e-12 && circle == 1.0,
          "|A - 2| " + fmt(da) + ", |P - 4 sqrt 2| " + fmt(dp) + ", |c - pi/4| " + fmt(dc) +
              ", c(pi, 2 pi) = " + format_double(circle)};
}

Outcome criterion_prune_equivalence() {
  bool ok = true;
  std::ostringstream detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto model = centered(random_model(2, 4, 10, 1, seed), 2);
    const auto init = init_hypercube(2, -1, 1);
    const auto schedule = NeuronSchedule::for_model(model, true);
    ExtractOptions on;
    on.level_set_prune = true;
    const auto full = extract(model, init, schedule);
    const auto pruned = extract(model, init, schedule, on);
    if (!full || !pruned) return {false, "extraction failed"};
    const auto out = output_entry(model, schedule, init.domain.m());
    const auto a = boundary_subcomplex(full->skeleton, out);
    const auto b = boundary_subcomplex(pruned->skeleton, out);
    std::map<SignVector, std::vector<double>> pa, pb;
    for (std::size_t v = 0; v < a.vertex_count(); ++v)
      pa[a.vertex_signs[v]].assign(a.position(v).begin(), a.position(v).end());
    for (std::size_t v = 0; v < b.vertex_count(); ++v)
      pb[b.vertex_signs[v]].assign(b.position(v).begin(), b.position(v).end());
    bool same = a.vertex_count() > 0 && pa.size() == pb.size() &&
                std::equal(pa.begin(), pa.end(), pb.begin(), [](const auto& x, const auto& y) {
                  if (x.first != y.first) return false;
                  for (std::size_t k = 0; k < x.second.size(); ++k)
                    if (std::abs(x.second[k] - y.second[k]) > 1e-9) return false;
                  return true;
                });
    auto ea = a.edge_signs, eb = b.edge_signs;
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    same = same && ea == eb;
    const bool fewer = pruned->edges_processed() < full->edges_processed();
    ok = ok && same && fewer;
    detail << (seed ? "; " : "") << a.vertex_count() << " boundary vertices "
           << (same ? "identical" : "DIFFER") << ", edges processed " << full->edges_processed()
           << " -> " << pruned->edges_processed();
  }
  return {ok, detail.str()};
}

Outcome criterion_parameter_pruning() {
  // Level set |x| + |y| = 1 through three hidden layers. Layer 1 carries two
  // dead units relu(x - 10) and relu(-y - 10), layer 3 one dead unit; layer 2
  // passes h + 1 through, so every other unit is active or crosses the level set.
  MlpSpec model;
  model.in_dim = 2;
  model.layers = {
      LayerSpec{6, 2, {1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 0, -1}, {0, 3, 0, 3, -10, -10}},
      LayerSpec{4, 6, {1, 0, 0, 0, 5, -5,  //
                       0, 1, 0, 0, 5, 5,   //
                       0, 0, 1, 0, -5, 5,  //
                       0, 0, 0, 1, 5, -5},
                {1, 1, 1, 1}},
      LayerSpec{5, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0.25, 0.25, 0.25, 0.25},
                {0, 0, 0, 0, -40}},
      LayerSpec{1, 5, {2, -1, 2, -1, 9}, {3}}};
  check_model(model);

  const auto init = init_hypercube(2, -2, 2);
  const auto schedule = NeuronSchedule::for_model(model, true);
  const auto res = extract(model, init, schedule);
  if (!res) return {false, "extraction failed"};
  const auto mesh = boundary_subcomplex(res->skeleton, output_entry(model, schedule, init.domain.m()));
  if (mesh.vertex_count() == 0) return {false, "empty level set"};
  const auto labels = classify_neurons_on_boundary(model, mesh.positions);
  const auto pruned = prune_stably_negative(model, labels);

  // Closed form over the original widths.
  const auto w = model.widths();
  std::size_t expected = 0, removed = 0;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const std::size_t r = static_cast<std::size_t>(
        std::count(labels[l].begin(), labels[l].end(), NeuronLabel::kStablyNegative));
    removed += r;
    expected += r * (w[l] + 1 + w[l + 2]);
  }
  const bool count_ok = removed >= 2 && model.parameter_count() - pruned.parameter_count() == expected;

  XorShift64Star rng(99);
  double worst = 0.0;
  std::size_t used = 0;
  std::vector<double> x(2);
  for (int s = 0; s < 10000; ++s) {
    for (auto& v : x) v = 4.0 * rng.uniform_open() - 2.0;
    const auto trace = forward_trace(model, x);
    bool inactive = true;
    for (std::size_t l = 0; l < labels.size(); ++l)
      for (std::size_t i = 0; i < labels[l].size(); ++i)
        if (labels[l][i] == NeuronLabel::kStablyNegative && trace.pre[l][i] >= 0) inactive = false;
    if (!inactive) continue;
    ++used;
    worst = std::max(worst, std::abs(evaluate(pruned, x)[0] - trace.output()[0]));
  }
  return {count_ok && worst <= 1e-12 && used == 10000,
          std::to_string(removed) + " neurons removed, parameters " +
              std::to_string(model.parameter_count()) + " -> " +
              std::to_string(pruned.parameter_count()) + " (closed form " +
              std::to_string(model.parameter_count() - expected) + "), max |f' - f| " + fmt(worst) +
              " over " + std::to_string(used) + " samples"};
}

Outcome criterion_scaling() {
  constexpr int kRepeats = 3;
  std::vector<double> vertices, seconds;
  std::size_t checked = 0, violations = 0;
  double worst_ratio = 0.0;
  for (std::size_t width : {10, 20, 40})
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto model = random_model(3, 4, width, 1, seed);
      const auto init = init_hypercube(3, -1, 1);
      const auto schedule = NeuronSchedule::for_model(model, false);
      double best = INFINITY;
      std::optional<ExtractResult> res;
      for (int r = 0; r < kRepeats; ++r) {
        res = extract(model, init, schedule);
        if (!res) return {false, "extraction failed"};
        best = std::min(best, res->seconds);
      }
      vertices.push_back(static_cast<double>(res->skeleton.vertex_count()));
      seconds.push_back(best);
      const auto bound = check_split_bound(res->iterations, 3, 4 * 3);
      checked += bound.checked;
      violations += bound.violations;
      worst_ratio = std::max(worst_ratio, bound.worst_ratio);
    }
  const auto fit = fit_loglog(vertices, seconds);
  const bool slope_ok = fit.slope >= 0.8 && fit.slope <= 1.4;
  const bool ok = slope_ok && violations == 0;
  return {ok, std::string(slope_ok ? "" : "OUT OF RANGE ") + "slope " + fmt(fit.slope) + " (range [0.8, 1.4]) over " + fmt(fit.decades) +
                  " decades of |V| (" + fmt(vertices.front()) + " .. " +
                  fmt(*std::max_element(vertices.begin(), vertices.end())) + "), rms " +
                  fmt(fit.rms_residual) + "; split bound " +
                  (violations ? "VIOLATED, held on " : "held on ") +
                  std::to_string(checked - violations) + "/" + std::to_string(checked) +
                  " iterations, worst |E^| i / (|E| D) " + fmt(worst_ratio)};
}

Outcome criterion_distances() {
  bool ok = true;
  std::size_t boundary_vertices = 0;
  double min_boundary_r = INFINITY;
  std::size_t nets_with_interior = 0, nets = 0;
  for (std::size_t d : {2, 3})
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto model = random_model(d, 4, 10, 1, seed);
      const auto res =
          extract(model, init_hypercube(d, -100, 100), NeuronSchedule::for_model(model, false));
      if (!res) return {false, "extraction failed"};
      const auto h = distance_histogram(res->skeleton);
      bool interior_inside = false;
      for (std::size_t v = 0; v < h.r.size(); ++v) {
        if (h.on_boundary[v]) {
          ++boundary_vertices;
          min_boundary_r = std::min(min_boundary_r, h.r[v]);
          if (h.r[v] < 100.0 - 1e-9) ok = false;
        } else if (h.r[v] < 100.0) {
          interior_inside = true;
        }
      }
      ++nets;
      nets_with_interior += interior_inside;
    }
  ok = ok && nets_with_interior == nets;
  return {ok, "min boundary-class r " + format_double(min_boundary_r) + " over " +
                  std::to_string(boundary_vertices) + " vertices; " +
                  std::to_string(nets_with_interior) + "/" + std::to_string(nets) +
                  " nets have an interior-class vertex with r < 100"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 residual validation", criterion_residuals},
      {"2 single-layer oracle equality", criterion_oracle},
      {"3 Euler characteristic", criterion_euler},
      {"4 midpoint consistency", criterion_midpoint},
      {"6 region containment", criterion_containment},
      {"7 compactness ground truth", criterion_compactness},
      {"8 level-set pruning equivalence", criterion_prune_equivalence},
      {"9 parameter pruning", criterion_parameter_pruning},
      {"10 scaling", criterion_scaling},
      {"11 distance distribution", criterion_distances},
      // Last, so it covers every extraction above.
      {"5 pairing invariant", criterion_pairing},
  };
  std::map<int, std::string> lines;
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto start = Clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    const std::string line = std::string(o.pass ? "PASS" : "FAIL") + "  criterion " + name +
                             ": " + o.detail + " [" + fmt(since(start)) + " s]";
    lines[std::atoi(name)] = line;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
  }
  std::printf("\nsummary (criterion order)\n");
  for (const auto& [n, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
