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

#include "edgesub/poset.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "edgesub/errors.hpp"

namespace edgesub {

namespace {

CellSet from_table(const SignTable& table, const std::vector<std::uint8_t>& alive,
                   std::size_t dim) {
  std::vector<std::uint32_t> ids;
  for (std::uint32_t i = 0; i < alive.size(); ++i)
    if (alive[i]) ids.push_back(i);
  std::vector<SignVector> rows;
  rows.reserve(ids.size());
  for (auto i : ids) rows.push_back(table.row(i));
  std::vector<std::uint32_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return rows[a] < rows[b]; });
  CellSet out;
  out.dim = dim;
  for (auto k : order) {
    if (!out.signs.empty() && out.signs.back() == rows[k])
      throw InvariantViolation("duplicate cell " + rows[k].to_string() + " in skeleton");
    out.signs.push_back(std::move(rows[k]));
    out.origin.push_back(ids[k]);
  }
  return out;
}

// A sorted, deduplicated group of parents with their child lists.
struct Run {
  std::vector<SignVector> signs;
  std::vector<std::vector<std::uint32_t>> children;
};

Run make_run(const CellSet& cells, std::size_t begin, std::size_t end, std::size_t m,
             bool keep_children) {
  std::vector<std::pair<SignVector, std::uint32_t>> pairs;
  for (std::size_t i = begin; i < end; ++i)
    for (auto& p : perturb_parents(cells.signs[i], m))
      pairs.emplace_back(std::move(p), static_cast<std::uint32_t>(i));
  std::sort(pairs.begin(), pairs.end());
  Run run;
  for (auto& [sv, child] : pairs) {
    if (run.signs.empty() || run.signs.back() != sv) {
      run.signs.push_back(std::move(sv));
      if (keep_children) run.children.emplace_back();
    }
    if (keep_children) run.children.back().push_back(child);
  }
  return run;
}

}  // namespace

CellSet vertex_cells(const Skeleton& sk) { return from_table(sk.vertex_signs, sk.vertex_alive, 0); }

CellSet edge_cells(const Skeleton& sk) { return from_table(sk.edge_signs, sk.edge_alive, 1); }

CellSet build_parent_cells(const CellSet& cells, std::size_t m, const PosetOptions& opts) {
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk_cells);
  std::vector<Run> runs;
  for (std::size_t begin = 0; begin < cells.size(); begin += chunk)
    runs.push_back(make_run(cells, begin, std::min(cells.size(), begin + chunk), m,
                            opts.keep_children));

  CellSet out;
  out.dim = cells.dim + 1;
  if (runs.size() == 1) {
    out.signs = std::move(runs[0].signs);
    out.children = std::move(runs[0].children);
  } else {
    // k-way merge; ties resolve in run order so child lists stay ascending.
    using Head = std::pair<std::size_t, std::size_t>;  // (run, position)
    auto later = [&](const Head& a, const Head& b) {
      const auto c = runs[a.first].signs[a.second] <=> runs[b.first].signs[b.second];
      return c != 0 ? c > 0 : a.first > b.first;
    };
    std::priority_queue<Head, std::vector<Head>, decltype(later)> heads(later);
    for (std::size_t r = 0; r < runs.size(); ++r)
      if (!runs[r].signs.empty()) heads.push({r, 0});
    while (!heads.empty()) {
      auto [r, pos] = heads.top();
      heads.pop();
      auto& sv = runs[r].signs[pos];
      if (out.signs.empty() || out.signs.back() != sv) {
        out.signs.push_back(std::move(sv));
        if (opts.keep_children) out.children.emplace_back();
      }
      if (opts.keep_children) {
        auto& src = runs[r].children[pos];
        out.children.back().insert(out.children.back().end(), src.begin(), src.end());
      }
      if (pos + 1 < runs[r].signs.size()) heads.push({r, pos + 1});
      if (opts.max_cells != 0 && out.signs.size() > opts.max_cells)
        throw BudgetExceeded(out.dim, {});
    }
  }
  if (opts.max_cells != 0 && out.signs.size() > opts.max_cells) throw BudgetExceeded(out.dim, {});
  return out;
}

long long CellCounts::euler() const {
  long long chi = 0;
  for (std::size_t k = 0; k < dims.size(); ++k)
    chi += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(dims[k]);
  return chi;
}

CellCounts count_cells(const Skeleton& sk, std::size_t m, std::size_t up_to,
                       const PosetOptions& opts) {
  if (up_to > sk.dim) throw InputError("count_cells: up_to exceeds the input dimension");
  CellCounts counts;
  counts.dims.push_back(sk.vertex_count());
  if (up_to >= 1) counts.dims.push_back(sk.edge_count());
  if (up_to < 2) return counts;
  PosetOptions counting = opts;
  counting.keep_children = false;
  CellSet level = edge_cells(sk);
  for (std::size_t k = 2; k <= up_to; ++k) {
    try {
      level = build_parent_cells(level, m, counting);
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded(k, counts.dims);
    }
    counts.dims.push_back(level.size());
  }
  return counts;
}

std::vector<SignVector> region_signatures(const Skeleton& sk, std::size_t m,
                                          const PosetOptions& opts) {
  PosetOptions counting = opts;
  counting.keep_children = false;
  CellSet level = sk.dim == 0 ? vertex_cells(sk) : edge_cells(sk);
  if (sk.dim == 1) return level.signs;
  for (std::size_t k = 2; k <= sk.dim; ++k) level = build_parent_cells(level, m, counting);
  return level.signs;
}

}  // namespace edgesub
