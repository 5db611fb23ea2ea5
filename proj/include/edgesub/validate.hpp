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
#include <span>
#include <vector>

#include "edgesub/model.hpp"
#include "edgesub/signvec.hpp"
#include "edgesub/skeleton.hpp"
#include "edgesub/subdivide.hpp"

namespace edgesub {

// |value| of every hyperplane a vertex claims to lie on (Zero entries).
struct ResidualReport {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double max_facet = 0.0;
  std::vector<double> max_per_layer;
  std::size_t dim = 0;
  double extent = 0.0;
  std::size_t samples = 0;
  std::size_t degenerate = 0;

  double relative() const { return extent > 0 ? max_abs / extent : max_abs; }
};

ResidualReport residuals(const Skeleton& sk, const MlpSpec& model, const Domain& domain,
                         const NeuronSchedule& schedule);

struct MidpointReport {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::vector<std::uint32_t> failures;  // first few failing edge ids
};

// Evaluates every facet and processed neuron at each edge midpoint: non-Zero
// entries must match the evaluated sign, Zero entries must be within tol.
MidpointReport midpoint_check(const Skeleton& sk, const MlpSpec& model, const Domain& domain,
                              const NeuronSchedule& schedule, double tol);

struct OracleVertex {
  std::vector<double> position;
  SignVector sign;
};

struct OracleResult {
  std::vector<OracleVertex> vertices;  // ascending sign-vector
  std::size_t singular = 0;
  std::size_t degenerate = 0;
};

// Brute force over every D-subset of {domain facets} + {first-layer neuron
// hyperplanes}: solve, keep points inside the closed domain that lie on no
// further hyperplane.
OracleResult oracle_single_layer_vertices(const MlpSpec& model, const Domain& domain);

struct VertexSetComparison {
  std::size_t extracted = 0;
  std::size_t oracle = 0;
  std::size_t unmatched = 0;
  double max_coord_diff = 0.0;

  bool equal(double tol) const {
    return extracted == oracle && unmatched == 0 && max_coord_diff <= tol;
  }
};

VertexSetComparison compare_vertex_sets(const Skeleton& sk, const OracleResult& oracle);

// Uniform samples of the domain mapped to region sign-vectors (m Plus entries,
// then one sign per scheduled neuron). Ascending and deduplicated.
std::vector<SignVector> sampled_region_oracle(const MlpSpec& model, const Domain& domain,
                                              const NeuronSchedule& schedule, std::size_t n,
                                              std::uint64_t seed, unsigned threads = 1);

struct ContainmentReport {
  std::size_t sampled = 0;
  std::size_t extracted = 0;
  std::size_t not_extracted = 0;  // sampled signatures missing from the extraction
  double coverage = 0.0;          // sampled / extracted

  bool subset() const { return not_extracted == 0; }
};

ContainmentReport compare_regions(std::span<const SignVector> sampled,
                                  std::span<const SignVector> extracted);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double decades = 0.0;  // log10(max |V| / min |V|)
  std::size_t runs = 0;
};

// Least-squares fit of log(y) = slope * log(x) + intercept.
ScalingFit fit_loglog(std::span<const double> x, std::span<const double> y);

// One entry per run: total time against final vertex count.
ScalingFit scaling_report(std::span<const std::vector<IterationStats>> runs);

struct SplitBoundReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max of |E^| * i / (|E| D)
};

// Checks |E^| < |E| D / i with i the number of neurons already processed,
// for every iteration with i > min_processed.
SplitBoundReport check_split_bound(std::span<const IterationStats> stats, std::size_t dim,
                                   std::size_t min_processed);

}  // namespace edgesub
