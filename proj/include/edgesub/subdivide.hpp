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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "edgesub/model.hpp"
#include "edgesub/signvec.hpp"
#include "edgesub/skeleton.hpp"

namespace edgesub {

// One edge cut by the current neuron.
struct SplitRecord {
  std::uint32_t edge = 0;
  std::uint32_t positive = 0;  // V+
  std::uint32_t negative = 0;  // V-
  double value_positive = 0.0;
  double value_negative = 0.0;
  std::uint32_t new_vertex = 0;  // V0
};

struct IterationStats {
  NeuronRef neuron;
  std::size_t iteration = 0;  // 1-based position in the schedule
  std::size_t vertices_before = 0;
  std::size_t edges_before = 0;
  std::size_t vertices_after = 0;
  std::size_t edges_after = 0;
  std::size_t splitting_edges = 0;
  std::size_t intersecting_edges = 0;
  std::size_t degenerate = 0;
  double seconds = 0.0;
  std::size_t memory_bytes = 0;
};

struct PruneStats {
  std::size_t after_layer = 0;
  std::size_t vertices_before = 0;
  std::size_t edges_before = 0;
  std::size_t vertices_pruned = 0;
  std::size_t edges_pruned = 0;
};

struct Crossing {
  std::vector<double> point;
  double t = 0.0;
};

// Zero of the affine interpolant between (x+, v+) and (x-, v-):
// t = v+ / (v+ - v-), x0 = x+ + t (x- - x+). Needs v+ > 0 >= v-; v- == 0 only
// arises from the negative tie-break and yields t = 1.
Crossing interpolate_crossing(std::span<const double> x_pos, double v_pos,
                              std::span<const double> x_neg, double v_neg);

struct NewEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  SignVector sign;
};

// Perturbs each splitting edge's sign-vector into its parent 2-faces
// and pairs the two splitting edges of each face. Must run before the current
// neuron's sign column is appended. Returned edges are sorted by face and
// carry the face sign-vector with Zero appended. Throws PairingError when a
// face does not occur exactly twice.
std::vector<NewEdge> pair_splitting_faces(std::span<const SplitRecord> splits,
                                          const Skeleton& sk, std::size_t m,
                                          unsigned threads = 1);

struct ExtractOptions {
  bool level_set_prune = false;
  // Interpolate cached hidden activations at new vertices instead of
  // recomputing them with a forward pass.
  bool interpolate_hidden = false;
  bool check_invariants = false;
  unsigned threads = 1;
  double degenerate_epsilon = 1e-12;
  std::function<void(const IterationStats&)> on_iteration;
};

// Runs edge subdivision on a skeleton in place, caching each vertex's input
// to the layer currently being processed.
class EdgeSubdivider {
 public:
  EdgeSubdivider(const MlpSpec& model, Skeleton& sk, ExtractOptions opts = {});

  // Full subdivision pass for the next neuron.
  IterationStats subdivide(const NeuronRef& neuron);
  // Kills alive edges whose endpoints agree on every neuron in `remaining`,
  // then vertices left without edges.
  PruneStats prune_future(std::span<const NeuronRef> remaining);
  void compact();
  std::size_t memory_bytes() const;

 private:
  void advance_to(std::size_t layer);
  void append_cache_row(std::uint32_t v, const SplitRecord& split, double t);

  const MlpSpec& model_;
  Skeleton& sk_;
  ExtractOptions opts_;
  std::size_t layer_ = 1;
  std::size_t width_ = 0;
  std::vector<double> cache_;
  std::size_t iteration_ = 0;
};

// One subdivision iteration on `sk`, evaluating the network from scratch.
IterationStats subdivide_once(Skeleton& sk, const MlpSpec& model, const NeuronRef& neuron,
                              ExtractOptions opts = {});

PruneStats prune_future(Skeleton& sk, const MlpSpec& model, std::span<const NeuronRef> remaining);

struct ExtractResult {
  Skeleton skeleton;
  NeuronSchedule schedule;
  std::vector<IterationStats> iterations;
  std::vector<PruneStats> prunes;
  std::size_t degenerate = 0;
  double seconds = 0.0;
  std::size_t peak_memory_bytes = 0;

  // Sum of alive edges entering each iteration.
  std::size_t edges_processed() const;
};

ExtractResult extract_complex(const MlpSpec& model, const InitialComplex& initial,
                              const NeuronSchedule& schedule, const ExtractOptions& opts = {});

// Sign-vector index of the output neuron `output_index` (requires
// include_output).
std::size_t output_entry(const MlpSpec& model, const NeuronSchedule& schedule, std::size_t m,
                         std::size_t output_index = 0);

}  // namespace edgesub
