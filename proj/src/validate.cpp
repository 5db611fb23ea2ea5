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

#include "edgesub/validate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "edgesub/errors.hpp"
#include "edgesub/parallel.hpp"

namespace edgesub {

namespace {

double entry_value(std::size_t j, std::size_t m, const Domain& domain,
                   const NeuronSchedule& schedule, const PreactivationTrace& trace,
                   std::span<const double> x) {
  return j < m ? domain.facets[j].eval(x) : trace.at(schedule.order[j - m]);
}

void check_lengths(const Skeleton& sk, const Domain& domain, const NeuronSchedule& schedule) {
  if (sk.m != domain.m() || sk.t != schedule.size())
    throw InputError("skeleton does not match the domain and schedule");
}

}  // namespace

ResidualReport residuals(const Skeleton& sk, const MlpSpec& model, const Domain& domain,
                         const NeuronSchedule& schedule) {
  check_lengths(sk, domain, schedule);
  ResidualReport report;
  report.dim = sk.dim;
  report.extent = domain.extent();
  report.max_per_layer.assign(model.depth(), 0.0);
  double sum = 0.0;
  for (std::size_t v = 0; v < sk.vertex_slots(); ++v) {
    if (!sk.vertex_alive[v]) continue;
    const auto x = sk.position(v);
    const auto trace = forward_trace(model, x);
    for (std::size_t j = 0; j < sk.sign_length(); ++j) {
      if (sk.vertex_signs.get(v, j) != Sign::kZero) continue;
      const double r = std::abs(entry_value(j, sk.m, domain, schedule, trace, x));
      if (j < sk.m) {
        report.max_facet = std::max(report.max_facet, r);
      } else {
        auto& slot = report.max_per_layer[schedule.order[j - sk.m].layer - 1];
        slot = std::max(slot, r);
      }
      report.max_abs = std::max(report.max_abs, r);
      sum += r;
      ++report.samples;
    }
  }
  report.mean_abs = report.samples ? sum / static_cast<double>(report.samples) : 0.0;
  return report;
}

MidpointReport midpoint_check(const Skeleton& sk, const MlpSpec& model, const Domain& domain,
                              const NeuronSchedule& schedule, double tol) {
  check_lengths(sk, domain, schedule);
  MidpointReport report;
  std::vector<double> mid(sk.dim);
  for (std::uint32_t e = 0; e < sk.edge_slots(); ++e) {
    if (!sk.edge_alive[e]) continue;
    const auto a = sk.position(sk.edges[e][0]);
    const auto b = sk.position(sk.edges[e][1]);
    for (std::size_t k = 0; k < sk.dim; ++k) mid[k] = 0.5 * (a[k] + b[k]);
    const auto trace = forward_trace(model, mid);
    bool ok = true;
    for (std::size_t j = 0; j < sk.sign_length() && ok; ++j) {
      const double value = entry_value(j, sk.m, domain, schedule, trace, mid);
      const Sign expected = sk.edge_signs.get(e, j);
      ok = expected == Sign::kZero ? std::abs(value) <= tol : sign_of_value(value) == expected;
    }
    if (ok) {
      ++report.passed;
    } else {
      ++report.failed;
      if (report.failures.size() < 16) report.failures.push_back(e);
    }
  }
  return report;
}

OracleResult oracle_single_layer_vertices(const MlpSpec& model, const Domain& domain) {
  const std::size_t d = domain.dim;
  if (model.in_dim != d) throw InputError("model and domain dimensions differ");
  const auto& first = model.layers.front();
  const std::size_t m = domain.m();
  const std::size_t total = m + first.rows;

  // Hyperplane h: normal(h) . x + shift(h) = 0.
  Eigen::MatrixXd normals(total, d);
  Eigen::VectorXd shifts(total);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < d; ++k) normals(j, k) = domain.facets[j].normal[k];
    shifts(j) = -domain.facets[j].offset;
  }
  for (std::size_t i = 0; i < first.rows; ++i) {
    for (std::size_t k = 0; k < d; ++k) normals(m + i, k) = first.weight(i, k);
    shifts(m + i) = first.bias[i];
  }
  auto value = [&](std::size_t h, std::span<const double> x) {
    if (h < m) return domain.facets[h].eval(x);
    return affine(first.row(h - m), first.bias[h - m], x);
  };

  OracleResult result;
  if (total < d) return result;
  std::vector<std::size_t> subset(d);
  for (std::size_t k = 0; k < d; ++k) subset[k] = k;
  std::vector<double> x(d);
  const double scale = std::max(1.0, domain.extent());
  while (true) {
    Eigen::MatrixXd a(d, d);
    Eigen::VectorXd rhs(d);
    for (std::size_t r = 0; r < d; ++r) {
      a.row(static_cast<Eigen::Index>(r)) = normals.row(static_cast<Eigen::Index>(subset[r]));
      rhs(static_cast<Eigen::Index>(r)) = -shifts(static_cast<Eigen::Index>(subset[r]));
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || lu.determinant() == 0.0) {
      ++result.singular;
    } else if (1.0 / rcond > 1e12) {
      ++result.degenerate;
    } else {
      Eigen::VectorXd sol = lu.solve(rhs);
      for (std::size_t k = 0; k < d; ++k) x[k] = sol(static_cast<Eigen::Index>(k));
      SignVector sv(total, Sign::kPlus);
      bool keep = true;
      for (std::size_t h = 0, s = 0; h < total && keep; ++h) {
        if (s < d && subset[s] == h) {
          sv.set(h, Sign::kZero);
          ++s;
          continue;
        }
        const double val = value(h, x);
        if (std::abs(val) <= 1e-12 * scale) {
          ++result.degenerate;
          keep = false;
        } else if (h < m) {
          keep = val > 0.0;
        } else {
          sv.set(h, sign_of_value(val));
        }
      }
      if (keep) result.vertices.push_back({x, std::move(sv)});
    }
    // Next subset in lexicographic order.
    std::size_t k = d;
    while (k > 0 && subset[k - 1] == total - d + (k - 1)) --k;
    if (k == 0) break;
    ++subset[k - 1];
    for (std::size_t r = k; r < d; ++r) subset[r] = subset[r - 1] + 1;
  }
  std::sort(result.vertices.begin(), result.vertices.end(),
            [](const OracleVertex& p, const OracleVertex& q) { return p.sign < q.sign; });
  return result;
}

VertexSetComparison compare_vertex_sets(const Skeleton& sk, const OracleResult& oracle) {
  std::vector<std::pair<SignVector, std::uint32_t>> ours;
  for (std::uint32_t v = 0; v < sk.vertex_slots(); ++v)
    if (sk.vertex_alive[v]) ours.emplace_back(sk.vertex_signs.row(v), v);
  std::sort(ours.begin(), ours.end());
  VertexSetComparison cmp;
  cmp.extracted = ours.size();
  cmp.oracle = oracle.vertices.size();
  std::size_t i = 0, j = 0;
  while (i < ours.size() && j < oracle.vertices.size()) {
    const auto c = ours[i].first <=> oracle.vertices[j].sign;
    if (c < 0) {
      ++cmp.unmatched;
      ++i;
    } else if (c > 0) {
      ++cmp.unmatched;
      ++j;
    } else {
      const auto p = sk.position(ours[i].second);
      for (std::size_t k = 0; k < sk.dim; ++k)
        cmp.max_coord_diff =
            std::max(cmp.max_coord_diff, std::abs(p[k] - oracle.vertices[j].position[k]));
      ++i;
      ++j;
    }
  }
  cmp.unmatched += (ours.size() - i) + (oracle.vertices.size() - j);
  return cmp;
}

std::vector<SignVector> sampled_region_oracle(const MlpSpec& model, const Domain& domain,
                                              const NeuronSchedule& schedule, std::size_t n,
                                              std::uint64_t seed, unsigned threads) {
  const std::size_t d = domain.dim;
  const std::size_t m = domain.m();
  // Draw sequentially so the sample set does not depend on the thread count.
  XorShift64Star rng(seed);
  std::vector<double> points(n * d);
  std::vector<double> x(d);
  for (std::size_t s = 0; s < n; ++s) {
    do {
      for (std::size_t k = 0; k < d; ++k)
        x[k] = domain.box_lo[k] + (domain.box_hi[k] - domain.box_lo[k]) * rng.uniform_open();
    } while (!domain.contains(x));
    std::copy(x.begin(), x.end(), points.begin() + static_cast<std::ptrdiff_t>(s * d));
  }
  std::vector<SignVector> signs(n);
  parallel_for(n, threads, [&](std::size_t s) {
    const auto trace = forward_trace(model, std::span(points).subspan(s * d, d));
    SignVector sv(m + schedule.size(), Sign::kPlus);
    for (std::size_t k = 0; k < schedule.size(); ++k)
      sv.set(m + k, sign_of_value(trace.at(schedule.order[k])));
    signs[s] = std::move(sv);
  });
  std::unordered_set<SignVector> unique(signs.begin(), signs.end());
  std::vector<SignVector> out(unique.begin(), unique.end());
  std::sort(out.begin(), out.end());
  return out;
}

ContainmentReport compare_regions(std::span<const SignVector> sampled,
                                  std::span<const SignVector> extracted) {
  ContainmentReport report;
  report.sampled = sampled.size();
  report.extracted = extracted.size();
  for (const auto& sv : sampled)
    if (!std::binary_search(extracted.begin(), extracted.end(), sv)) ++report.not_extracted;
  report.coverage = extracted.empty() ? 0.0
                                      : static_cast<double>(sampled.size() - report.not_extracted) /
                                            static_cast<double>(extracted.size());
  return report;
}

ScalingFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("fit_loglog needs >= 2 points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double lo = x[0], hi = x[0];
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw InputError("fit_loglog needs positive values");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InputError("fit_loglog needs at least two distinct x values");
  ScalingFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(y[i]) - (fit.slope * std::log(x[i]) + fit.intercept);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  fit.decades = std::log10(hi / lo);
  fit.runs = x.size();
  return fit;
}

ScalingFit scaling_report(std::span<const std::vector<IterationStats>> runs) {
  std::vector<double> vertices, seconds;
  for (const auto& run : runs) {
    if (run.empty()) continue;
    double total = 0.0;
    for (const auto& s : run) total += s.seconds;
    vertices.push_back(static_cast<double>(run.back().vertices_after));
    seconds.push_back(total);
  }
  return fit_loglog(vertices, seconds);
}

SplitBoundReport check_split_bound(std::span<const IterationStats> stats, std::size_t dim,
                                   std::size_t min_processed) {
  SplitBoundReport report;
  for (const auto& s : stats) {
    const std::size_t processed = s.iteration - 1;
    if (processed <= min_processed || s.edges_before == 0) continue;
    ++report.checked;
    const double ratio = static_cast<double>(s.splitting_edges) * static_cast<double>(processed) /
                         (static_cast<double>(s.edges_before) * static_cast<double>(dim));
    report.worst_ratio = std::max(report.worst_ratio, ratio);
    if (!(ratio < 1.0)) ++report.violations;
  }
  return report;
}

}  // namespace edgesub
