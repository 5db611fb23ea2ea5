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
#include <stdexcept>
#include <vector>

#include "edgesub/signvec.hpp"
#include "edgesub/skeleton.hpp"

namespace edgesub {

// Deduplicated k-cells in ascending sign-vector order.
struct CellSet {
  std::size_t dim = 0;
  std::vector<SignVector> signs;
  // children[i]: indices into the (k-1)-cell set that produced cell i. Empty
  // unless requested.
  std::vector<std::vector<std::uint32_t>> children;
  // For sets read off a skeleton: the skeleton vertex/edge id of each cell.
  std::vector<std::uint32_t> origin;

  std::size_t size() const { return signs.size(); }
};

CellSet vertex_cells(const Skeleton& sk);
CellSet edge_cells(const Skeleton& sk);

struct PosetOptions {
  bool keep_children = false;
  // Input cells perturbed per sorted run.
  std::size_t chunk_cells = std::size_t{1} << 18;
  // Largest number of cells any level may hold; 0 disables the check.
  std::size_t max_cells = 0;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::size_t dim, std::vector<std::size_t> partial)
      : std::runtime_error("cell budget exceeded while building dimension " + std::to_string(dim)),
        partial_(std::move(partial)) {}
  // Counts n_0.. for the dimensions completed before the budget ran out.
  const std::vector<std::size_t>& partial() const { return partial_; }

 private:
  std::vector<std::size_t> partial_;
};

// Perturbs every cell into its parents and groups equal sign-vectors. Runs of
// chunk_cells inputs are sorted and deduplicated independently, then merged.
CellSet build_parent_cells(const CellSet& cells, std::size_t m, const PosetOptions& opts = {});

struct CellCounts {
  std::vector<std::size_t> dims;
  long long euler() const;
};

// n_0 and n_1 from the skeleton, n_k for k >= 2 by repeated perturbation.
CellCounts count_cells(const Skeleton& sk, std::size_t m, std::size_t up_to,
                       const PosetOptions& opts = {});

// Sign-vectors of all regions (dim-D cells), ascending.
std::vector<SignVector> region_signatures(const Skeleton& sk, std::size_t m,
                                          const PosetOptions& opts = {});

}  // namespace edgesub
