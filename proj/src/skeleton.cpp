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

#include "edgesub/skeleton.hpp"

#include <algorithm>
#include <limits>

#include "edgesub/errors.hpp"

namespace edgesub {

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::kHypercube:
      return "hypercube";
    case DomainKind::kSimplex:
      return "simplex";
    case DomainKind::kCustom:
      return "custom";
  }
  return "?";
}

double Domain::extent() const {
  double e = 0.0;
  for (std::size_t k = 0; k < box_lo.size(); ++k) e = std::max(e, box_hi[k] - box_lo[k]);
  return e;
}

bool Domain::contains(std::span<const double> x, double tol) const {
  return std::all_of(facets.begin(), facets.end(),
                     [&](const Halfspace& h) { return h.eval(x) >= -tol; });
}

std::size_t SignTable::count_zeros(std::size_t r) const {
  std::size_t n = 0;
  for (auto w : row_words(r)) n += zeros_in_word(w);
  return n;
}

std::size_t SignTable::push_row(const SignVector& sv) {
  if (sv.size() != length_) throw InvariantViolation("sign-vector length does not match table");
  return push_row_words(sv.words());
}

std::size_t SignTable::push_row_words(std::span<const std::uint64_t> words) {
  // The source may alias this table's storage, which resize() can move.
  std::vector<std::uint64_t> copy(words.begin(), words.begin() + SignVector::words_for(length_));
  data_.resize(data_.size() + stride_, 0);
  std::copy(copy.begin(), copy.end(), data_.end() - static_cast<std::ptrdiff_t>(stride_));
  return rows_++;
}

void SignTable::add_column() {
  reserve_length(length_ + 1);
  ++length_;
}

void SignTable::reserve_length(std::size_t length) {
  const std::size_t need = std::max<std::size_t>(1, SignVector::words_for(length));
  if (need <= stride_) return;
  const std::size_t grown = std::max(need, 2 * stride_);
  std::vector<std::uint64_t> next(rows_ * grown, 0);
  for (std::size_t r = 0; r < rows_; ++r)
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r * stride_), stride_,
                next.begin() + static_cast<std::ptrdiff_t>(r * grown));
  data_ = std::move(next);
  stride_ = grown;
}

void SignTable::select_rows(std::span<const std::uint32_t> keep) {
  std::vector<std::uint64_t> next(keep.size() * stride_);
  for (std::size_t k = 0; k < keep.size(); ++k)
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(keep[k] * stride_), stride_,
                next.begin() + static_cast<std::ptrdiff_t>(k * stride_));
  data_ = std::move(next);
  rows_ = keep.size();
}

std::size_t Skeleton::vertex_count() const {
  return static_cast<std::size_t>(std::count(vertex_alive.begin(), vertex_alive.end(), 1));
}

std::size_t Skeleton::edge_count() const {
  return static_cast<std::size_t>(std::count(edge_alive.begin(), edge_alive.end(), 1));
}

std::uint32_t Skeleton::add_vertex(std::span<const double> pos, const SignVector& sv) {
  positions.insert(positions.end(), pos.begin(), pos.end());
  vertex_signs.push_row(sv);
  vertex_alive.push_back(1);
  return static_cast<std::uint32_t>(vertex_alive.size() - 1);
}

std::uint32_t Skeleton::add_edge(std::uint32_t a, std::uint32_t b, const SignVector& sv) {
  edges.push_back({std::min(a, b), std::max(a, b)});
  edge_signs.push_row(sv);
  edge_alive.push_back(1);
  return static_cast<std::uint32_t>(edge_alive.size() - 1);
}

std::size_t Skeleton::memory_bytes() const {
  return positions.capacity() * sizeof(double) + vertex_signs.bytes() + edge_signs.bytes() +
         edges.capacity() * sizeof(edges[0]) + vertex_alive.capacity() + edge_alive.capacity();
}

namespace {

Skeleton empty_skeleton(std::size_t dim, std::size_t m) {
  Skeleton sk;
  sk.dim = dim;
  sk.m = m;
  sk.vertex_signs = SignTable(m);
  sk.edge_signs = SignTable(m);
  return sk;
}

// Connects every pair of vertices whose sign-vectors share dim - 1 zeros.
void connect_by_shared_zeros(Skeleton& sk) {
  const std::size_t n = sk.vertex_slots();
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      const auto sa = sk.vertex_signs.row(a), sb = sk.vertex_signs.row(b);
      std::size_t shared = 0;
      for (std::size_t j = 0; j < sk.m; ++j)
        shared += sa[j] == Sign::kZero && sb[j] == Sign::kZero;
      if (shared + 1 == sk.dim) sk.add_edge(a, b, edge_sign_from_vertices(sa, sb));
    }
  }
}

}  // namespace

InitialComplex init_hypercube(std::size_t dim, double lo, double hi) {
  if (dim == 0) throw InputError("dimension must be >= 1");
  if (!(lo < hi)) throw InputError("hypercube needs lo < hi");
  if (dim > 20) throw InputError("hypercube dimension too large");
  InitialComplex out;
  auto& dom = out.domain;
  dom.dim = dim;
  dom.kind = DomainKind::kHypercube;
  dom.box_lo.assign(dim, lo);
  dom.box_hi.assign(dim, hi);
  for (std::size_t j = 0; j < dim; ++j) {
    Halfspace lower{std::vector<double>(dim, 0.0), lo};
    lower.normal[j] = 1.0;
    Halfspace upper{std::vector<double>(dim, 0.0), -hi};
    upper.normal[j] = -1.0;
    dom.facets.push_back(std::move(lower));
    dom.facets.push_back(std::move(upper));
  }

  auto& sk = out.skeleton;
  sk = empty_skeleton(dim, 2 * dim);
  const std::size_t corners = std::size_t{1} << dim;
  std::vector<double> x(dim);
  for (std::size_t c = 0; c < corners; ++c) {
    SignVector sv(2 * dim, Sign::kPlus);
    for (std::size_t j = 0; j < dim; ++j) {
      const bool high = (c >> j) & 1u;
      x[j] = high ? hi : lo;
      sv.set(2 * j + (high ? 1 : 0), Sign::kZero);
    }
    sk.add_vertex(x, sv);
  }
  for (std::uint32_t c = 0; c < corners; ++c)
    for (std::size_t j = 0; j < dim; ++j)
      if (!((c >> j) & 1u)) {
        const auto d = static_cast<std::uint32_t>(c | (1u << j));
        sk.add_edge(c, d, edge_sign_from_vertices(sk.vertex_signs.row(c), sk.vertex_signs.row(d)));
      }
  // Canonical (lo, hi) order.
  std::vector<std::uint32_t> order(sk.edges.size());
  for (std::uint32_t e = 0; e < order.size(); ++e) order[e] = e;
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return sk.edges[a] < sk.edges[b]; });
  std::vector<std::array<std::uint32_t, 2>> sorted;
  for (auto e : order) sorted.push_back(sk.edges[e]);
  sk.edges = std::move(sorted);
  sk.edge_signs.select_rows(order);
  return out;
}

InitialComplex init_simplex(std::size_t dim, double scale) {
  if (dim == 0) throw InputError("dimension must be >= 1");
  if (!(scale > 0.0)) throw InputError("simplex needs scale > 0");
  InitialComplex out;
  auto& dom = out.domain;
  dom.dim = dim;
  dom.kind = DomainKind::kSimplex;
  const double far = scale * static_cast<double>(2 * dim - 1);
  dom.box_lo.assign(dim, -scale);
  dom.box_hi.assign(dim, far);
  for (std::size_t j = 0; j < dim; ++j) {
    Halfspace h{std::vector<double>(dim, 0.0), -scale};
    h.normal[j] = 1.0;
    dom.facets.push_back(std::move(h));
  }
  dom.facets.push_back({std::vector<double>(dim, -1.0), -scale * static_cast<double>(dim)});

  auto& sk = out.skeleton;
  sk = empty_skeleton(dim, dim + 1);
  std::vector<double> x(dim, -scale);
  SignVector base(dim + 1, Sign::kZero);
  base.set(dim, Sign::kPlus);
  sk.add_vertex(x, base);
  for (std::size_t i = 0; i < dim; ++i) {
    std::fill(x.begin(), x.end(), -scale);
    x[i] = far;
    SignVector sv(dim + 1, Sign::kZero);
    sv.set(i, Sign::kPlus);
    sk.add_vertex(x, sv);
  }
  connect_by_shared_zeros(sk);
  return out;
}

Skeleton compact(const Skeleton& sk, std::vector<std::uint32_t>* vertex_remap) {
  constexpr auto kGone = std::numeric_limits<std::uint32_t>::max();
  Skeleton out;
  out.dim = sk.dim;
  out.m = sk.m;
  out.t = sk.t;

  std::vector<std::uint32_t> remap(sk.vertex_slots(), kGone);
  std::vector<std::uint32_t> keep_v, keep_e;
  for (std::uint32_t v = 0; v < sk.vertex_slots(); ++v)
    if (sk.vertex_alive[v]) {
      remap[v] = static_cast<std::uint32_t>(keep_v.size());
      keep_v.push_back(v);
    }
  for (std::uint32_t e = 0; e < sk.edge_slots(); ++e)
    if (sk.edge_alive[e]) keep_e.push_back(e);

  out.positions.reserve(keep_v.size() * sk.dim);
  for (auto v : keep_v) {
    auto p = sk.position(v);
    out.positions.insert(out.positions.end(), p.begin(), p.end());
  }
  out.vertex_signs = sk.vertex_signs;
  out.vertex_signs.select_rows(keep_v);
  out.vertex_alive.assign(keep_v.size(), 1);

  out.edges.reserve(keep_e.size());
  for (auto e : keep_e) {
    const auto [a, b] = sk.edges[e];
    if (remap[a] == kGone || remap[b] == kGone)
      throw InvariantViolation("alive edge " + std::to_string(e) + " references a dead vertex");
    out.edges.push_back({remap[a], remap[b]});
  }
  out.edge_signs = sk.edge_signs;
  out.edge_signs.select_rows(keep_e);
  out.edge_alive.assign(keep_e.size(), 1);

  if (vertex_remap != nullptr) *vertex_remap = std::move(remap);
  return out;
}

std::optional<std::string> find_invariant_violation(const Skeleton& sk) {
  const std::size_t len = sk.sign_length();
  if (sk.vertex_signs.length() != len || sk.edge_signs.length() != len)
    return "sign-vector length differs from m + t = " + std::to_string(len);
  if (sk.positions.size() != sk.vertex_slots() * sk.dim ||
      sk.vertex_signs.rows() != sk.vertex_slots() || sk.edge_signs.rows() != sk.edge_slots() ||
      sk.edges.size() != sk.edge_slots())
    return std::string("array sizes disagree");
  for (std::size_t v = 0; v < sk.vertex_slots(); ++v) {
    if (!sk.vertex_alive[v]) continue;
    if (sk.vertex_signs.count_zeros(v) != sk.dim)
      return "vertex " + std::to_string(v) + " has " +
             std::to_string(sk.vertex_signs.count_zeros(v)) + " zeros";
  }
  for (std::size_t e = 0; e < sk.edge_slots(); ++e) {
    if (!sk.edge_alive[e]) continue;
    const auto [a, b] = sk.edges[e];
    if (!(a < b) || b >= sk.vertex_slots()) return "edge " + std::to_string(e) + " has bad ids";
    if (!sk.vertex_alive[a] || !sk.vertex_alive[b])
      return "edge " + std::to_string(e) + " references a dead vertex";
    if (sk.edge_signs.count_zeros(e) + 1 != sk.dim)
      return "edge " + std::to_string(e) + " has " +
             std::to_string(sk.edge_signs.count_zeros(e)) + " zeros";
    SignVector expected;
    try {
      expected = edge_sign_from_vertices(sk.vertex_signs.row(a), sk.vertex_signs.row(b));
    } catch (const InvariantViolation& err) {
      return "edge " + std::to_string(e) + ": " + err.what();
    }
    if (expected != sk.edge_signs.row(e))
      return "edge " + std::to_string(e) + " sign-vector " + sk.edge_signs.row(e).to_string() +
             " disagrees with its vertices (" + expected.to_string() + ")";
  }
  return std::nullopt;
}

void check_invariants(const Skeleton& sk) {
  if (auto problem = find_invariant_violation(sk)) throw InvariantViolation(*problem);
}

}  // namespace edgesub
