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

#include "edgesub/subdivide.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <unordered_map>

#include "edgesub/errors.hpp"
#include "edgesub/parallel.hpp"

namespace edgesub {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Crossing interpolate_crossing(std::span<const double> x_pos, double v_pos,
                              std::span<const double> x_neg, double v_neg) {
  if (!(v_pos > 0.0) || !(v_neg <= 0.0))
    throw InputError("interpolate_crossing needs v+ > 0 >= v-");
  if (x_pos.size() != x_neg.size()) throw InputError("interpolate_crossing: dimension mismatch");
  Crossing c;
  c.t = v_pos / (v_pos - v_neg);
  c.point.resize(x_pos.size());
  for (std::size_t k = 0; k < x_pos.size(); ++k)
    c.point[k] = x_pos[k] + c.t * (x_neg[k] - x_pos[k]);
  return c;
}

std::vector<NewEdge> pair_splitting_faces(std::span<const SplitRecord> splits,
                                          const Skeleton& sk, std::size_t m, unsigned threads) {
  std::vector<NewEdge> out;
  if (sk.dim < 2 || splits.empty()) return out;

  std::vector<std::vector<SignVector>> faces(splits.size());
  parallel_for(splits.size(), threads, [&](std::size_t k) {
    faces[k] = perturb_parents(sk.edge_signs.row(splits[k].edge), m);
  });

  struct Pair {
    std::uint32_t first = 0;
    std::uint32_t second = 0;
    std::uint32_t count = 0;
  };
  std::unordered_map<SignVector, Pair> buckets;
  buckets.reserve(2 * (sk.dim - 1) * splits.size());
  for (std::uint32_t k = 0; k < splits.size(); ++k) {
    for (auto& face : faces[k]) {
      auto [it, inserted] = buckets.try_emplace(std::move(face));
      Pair& p = it->second;
      if (p.count == 0)
        p.first = k;
      else if (p.count == 1)
        p.second = k;
      else
        throw PairingError(it->first.to_string(), p.count + 1);
      ++p.count;
    }
  }

  std::vector<std::pair<const SignVector*, const Pair*>> sorted;
  sorted.reserve(buckets.size());
  for (const auto& [face, pair] : buckets) {
    if (pair.count != 2) throw PairingError(face.to_string(), pair.count);
    sorted.emplace_back(&face, &pair);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return *a.first < *b.first; });
  out.reserve(sorted.size());
  for (const auto& [face, pair] : sorted)
    out.push_back({splits[pair->first].new_vertex, splits[pair->second].new_vertex,
                   append_sign(*face, Sign::kZero)});
  return out;
}

EdgeSubdivider::EdgeSubdivider(const MlpSpec& model, Skeleton& sk, ExtractOptions opts)
    : model_(model), sk_(sk), opts_(std::move(opts)), width_(model.in_dim), cache_(sk.positions) {
  if (sk.dim != model.in_dim)
    throw InputError("skeleton dimension " + std::to_string(sk.dim) +
                     " does not match model input " + std::to_string(model.in_dim));
}

void EdgeSubdivider::advance_to(std::size_t layer) {
  while (layer_ < layer) {
    const std::size_t rows = model_.layers[layer_ - 1].rows;
    const std::size_t n = sk_.vertex_slots();
    std::vector<double> next(n * rows);
    parallel_for(n, opts_.threads, [&](std::size_t v) {
      if (!sk_.vertex_alive[v]) return;
      std::vector<double> pre(rows);
      apply_layer(model_, layer_, std::span(cache_).subspan(v * width_, width_), pre,
                  std::span(next).subspan(v * rows, rows));
    });
    cache_ = std::move(next);
    width_ = rows;
    ++layer_;
  }
}

void EdgeSubdivider::append_cache_row(std::uint32_t v, const SplitRecord& split, double t) {
  const std::size_t base = cache_.size();
  cache_.resize(base + width_);
  std::span<double> row(cache_.data() + base, width_);
  if (opts_.interpolate_hidden) {
    const double* a = cache_.data() + split.positive * width_;
    const double* b = cache_.data() + split.negative * width_;
    for (std::size_t k = 0; k < width_; ++k) row[k] = a[k] + t * (b[k] - a[k]);
    return;
  }
  std::vector<double> input(sk_.position(v).begin(), sk_.position(v).end());
  for (std::size_t l = 1; l < layer_; ++l) {
    const std::size_t rows = model_.layers[l - 1].rows;
    std::vector<double> pre(rows), post(rows);
    apply_layer(model_, l, input, pre, post);
    input = std::move(post);
  }
  std::copy(input.begin(), input.end(), row.begin());
}

IterationStats EdgeSubdivider::subdivide(const NeuronRef& neuron) {
  const auto start = Clock::now();
  if (neuron.layer < layer_) throw InputError("neurons must be processed in layer order");
  advance_to(neuron.layer);

  IterationStats stats;
  stats.neuron = neuron;
  stats.iteration = ++iteration_;
  stats.vertices_before = sk_.vertex_count();
  stats.edges_before = sk_.edge_count();

  // Evaluate.
  const auto& spec = model_.layers[neuron.layer - 1];
  const auto weights = spec.row(neuron.index);
  const double bias = spec.bias[neuron.index];
  const std::size_t nv = sk_.vertex_slots();
  std::vector<double> value(nv, 0.0);
  parallel_for(nv, opts_.threads, [&](std::size_t v) {
    if (sk_.vertex_alive[v])
      value[v] = affine(weights, bias, std::span(cache_).subspan(v * width_, width_));
  });

  // Signs.
  DegeneracyCounter degeneracy{opts_.degenerate_epsilon, 0};
  std::vector<Sign> sign(nv, Sign::kMinus);
  for (std::size_t v = 0; v < nv; ++v)
    if (sk_.vertex_alive[v]) sign[v] = sign_of_value(value[v], &degeneracy);
  stats.degenerate = degeneracy.count;

  // Splitting edges, ascending edge id.
  std::vector<SplitRecord> splits;
  const std::size_t ne = sk_.edge_slots();
  auto next_vertex = static_cast<std::uint32_t>(nv);
  for (std::uint32_t e = 0; e < ne; ++e) {
    if (!sk_.edge_alive[e]) continue;
    const auto [a, b] = sk_.edges[e];
    if (sign[a] == sign[b]) continue;
    SplitRecord s;
    s.edge = e;
    s.positive = sign[a] == Sign::kPlus ? a : b;
    s.negative = sign[a] == Sign::kPlus ? b : a;
    s.value_positive = value[s.positive];
    s.value_negative = value[s.negative];
    s.new_vertex = next_vertex++;
    splits.push_back(s);
  }
  stats.splitting_edges = splits.size();

  // (5, keys) Pairing uses the sign-vectors before this neuron's column.
  std::vector<NewEdge> intersecting = pair_splitting_faces(splits, sk_, sk_.m, opts_.threads);
  stats.intersecting_edges = intersecting.size();

  // (2, commit) Append this neuron's column.
  sk_.vertex_signs.add_column();
  sk_.edge_signs.add_column();
  const std::size_t col = sk_.sign_length();
  for (std::size_t v = 0; v < nv; ++v)
    if (sk_.vertex_alive[v]) sk_.vertex_signs.set(v, col, sign[v]);
  for (std::size_t e = 0; e < ne; ++e)
    if (sk_.edge_alive[e]) sk_.edge_signs.set(e, col, sign[sk_.edges[e][0]]);

  // New vertices and split edges.
  sk_.positions.reserve(sk_.positions.size() + splits.size() * sk_.dim);
  for (const auto& s : splits) {
    const auto crossing = interpolate_crossing(sk_.position(s.positive), s.value_positive,
                                               sk_.position(s.negative), s.value_negative);
    sk_.positions.insert(sk_.positions.end(), crossing.point.begin(), crossing.point.end());
    const std::size_t row = sk_.vertex_signs.push_row_words(sk_.edge_signs.row_words(s.edge));
    sk_.vertex_signs.set(row, col, Sign::kZero);
    sk_.vertex_alive.push_back(1);
    append_cache_row(s.new_vertex, s, crossing.t);
  }
  for (const auto& s : splits) {
    sk_.edge_alive[s.edge] = 0;
    for (auto [end, side] : {std::pair{s.positive, Sign::kPlus}, std::pair{s.negative, Sign::kMinus}}) {
      sk_.edges.push_back({end, s.new_vertex});
      const std::size_t row = sk_.edge_signs.push_row_words(sk_.edge_signs.row_words(s.edge));
      sk_.edge_signs.set(row, col, side);
      sk_.edge_alive.push_back(1);
    }
  }

  // (5, commit) Intersecting edges, ascending face key.
  ++sk_.t;
  for (const auto& edge : intersecting) sk_.add_edge(edge.a, edge.b, edge.sign);

  stats.vertices_after = sk_.vertex_count();
  stats.edges_after = sk_.edge_count();
  stats.memory_bytes = memory_bytes();
  stats.seconds = seconds_since(start);
  if (opts_.check_invariants) check_invariants(sk_);
  return stats;
}

PruneStats EdgeSubdivider::prune_future(std::span<const NeuronRef> remaining) {
  PruneStats stats;
  stats.after_layer = layer_;
  stats.vertices_before = sk_.vertex_count();
  stats.edges_before = sk_.edge_count();
  if (remaining.empty()) return stats;

  const std::size_t nv = sk_.vertex_slots();
  std::vector<SignVector> future(nv);
  parallel_for(nv, opts_.threads, [&](std::size_t v) {
    if (!sk_.vertex_alive[v]) return;
    const auto trace = forward_trace(model_, sk_.position(v));
    SignVector sv(remaining.size(), Sign::kMinus);
    for (std::size_t k = 0; k < remaining.size(); ++k) sv.set(k, sign_of_value(trace.at(remaining[k])));
    future[v] = std::move(sv);
  });

  std::vector<std::uint8_t> used(nv, 0);
  for (std::size_t e = 0; e < sk_.edge_slots(); ++e) {
    if (!sk_.edge_alive[e]) continue;
    const auto [a, b] = sk_.edges[e];
    if (future[a] == future[b]) {
      sk_.edge_alive[e] = 0;
      ++stats.edges_pruned;
    } else {
      used[a] = used[b] = 1;
    }
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (sk_.vertex_alive[v] && !used[v]) {
      sk_.vertex_alive[v] = 0;
      ++stats.vertices_pruned;
    }
  return stats;
}

void EdgeSubdivider::compact() {
  std::vector<std::uint32_t> remap;
  Skeleton next = edgesub::compact(sk_, &remap);
  std::vector<double> cache(next.vertex_slots() * width_);
  for (std::size_t v = 0; v < remap.size(); ++v)
    if (remap[v] != std::numeric_limits<std::uint32_t>::max())
      std::copy_n(cache_.begin() + static_cast<std::ptrdiff_t>(v * width_), width_,
                  cache.begin() + static_cast<std::ptrdiff_t>(remap[v] * width_));
  cache_ = std::move(cache);
  sk_ = std::move(next);
}

std::size_t EdgeSubdivider::memory_bytes() const {
  return sk_.memory_bytes() + cache_.capacity() * sizeof(double);
}

IterationStats subdivide_once(Skeleton& sk, const MlpSpec& model, const NeuronRef& neuron,
                              ExtractOptions opts) {
  if (neuron.layer < 1 || neuron.layer > model.depth() ||
      neuron.index >= model.layers[neuron.layer - 1].rows)
    throw InputError("neuron is not part of the model");
  EdgeSubdivider sub(model, sk, std::move(opts));
  return sub.subdivide(neuron);
}

PruneStats prune_future(Skeleton& sk, const MlpSpec& model, std::span<const NeuronRef> remaining) {
  EdgeSubdivider sub(model, sk);
  return sub.prune_future(remaining);
}

std::size_t ExtractResult::edges_processed() const {
  std::size_t n = 0;
  for (const auto& s : iterations) n += s.edges_before;
  return n;
}

ExtractResult extract_complex(const MlpSpec& model, const InitialComplex& initial,
                              const NeuronSchedule& schedule, const ExtractOptions& opts) {
  const auto start = Clock::now();
  check_model(model);
  check_schedule(model, schedule);
  if (initial.skeleton.t != 0) throw InputError("extract_complex needs a fresh skeleton");
  if (initial.skeleton.m != initial.domain.m())
    throw InputError("skeleton and domain disagree on the facet count");
  if (opts.level_set_prune && !schedule.include_output)
    throw InputError("level-set pruning needs the output neuron in the schedule");

  ExtractResult result;
  result.schedule = schedule;
  result.skeleton = initial.skeleton;
  Skeleton& sk = result.skeleton;
  sk.vertex_signs.reserve_length(sk.m + schedule.size());
  sk.edge_signs.reserve_length(sk.m + schedule.size());

  EdgeSubdivider sub(model, sk, opts);
  const auto& order = schedule.order;
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto stats = sub.subdivide(order[k]);
    result.degenerate += stats.degenerate;
    result.peak_memory_bytes = std::max(result.peak_memory_bytes, stats.memory_bytes);
    if (opts.on_iteration) opts.on_iteration(stats);
    result.iterations.push_back(stats);

    const bool layer_done = k + 1 < order.size() && order[k + 1].layer != order[k].layer;
    if (opts.level_set_prune && layer_done) {
      result.prunes.push_back(sub.prune_future(std::span(order).subspan(k + 1)));
      sub.compact();
    } else if (4 * (sk.vertex_slots() - stats.vertices_after) > sk.vertex_slots() ||
               4 * (sk.edge_slots() - stats.edges_after) > sk.edge_slots()) {
      sub.compact();
    }
  }
  sub.compact();
  result.seconds = seconds_since(start);
  return result;
}

std::size_t output_entry(const MlpSpec& model, const NeuronSchedule& schedule, std::size_t m,
                         std::size_t output_index) {
  if (!schedule.include_output) throw InputError("schedule does not include the output layer");
  if (output_index >= model.out_dim()) throw InputError("output index out of range");
  return m + schedule.position({model.depth(), output_index});
}

}  // namespace edgesub
