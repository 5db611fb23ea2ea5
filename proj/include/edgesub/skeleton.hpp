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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgesub/signvec.hpp"

namespace edgesub {

// {x : normal . x - offset >= 0}. The hyperplane is the zero set.
struct Halfspace {
  std::vector<double> normal;
  double offset = 0.0;

  double eval(std::span<const double> x) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < normal.size(); ++k) acc += normal[k] * x[k];
    return acc - offset;
  }
};

enum class DomainKind { kHypercube, kSimplex, kCustom };

const char* to_string(DomainKind kind);

struct Domain {
  std::size_t dim = 0;
  DomainKind kind = DomainKind::kCustom;
  std::vector<Halfspace> facets;
  // Axis-aligned bounding box, used for sampling and figure extents.
  std::vector<double> box_lo;
  std::vector<double> box_hi;

  std::size_t m() const { return facets.size(); }
  double extent() const;
  bool contains(std::span<const double> x, double tol = 0.0) const;
};

// Rows of equal length packed two bits per entry. Rows share a fixed word
// stride; growing past it restrides the whole table.
class SignTable {
 public:
  explicit SignTable(std::size_t length = 0) { reserve_length(length); length_ = length; }

  std::size_t rows() const { return rows_; }
  std::size_t length() const { return length_; }

  Sign get(std::size_t r, std::size_t j) const {
    return static_cast<Sign>((data_[r * stride_ + j / SignVector::kPerWord] >>
                              SignVector::shift(j)) & 3u);
  }
  void set(std::size_t r, std::size_t j, Sign s) {
    auto& w = data_[r * stride_ + j / SignVector::kPerWord];
    w = (w & ~(std::uint64_t{3} << SignVector::shift(j))) |
        (std::uint64_t{static_cast<std::uint8_t>(s)} << SignVector::shift(j));
  }

  std::span<const std::uint64_t> row_words(std::size_t r) const {
    return {data_.data() + r * stride_, SignVector::words_for(length_)};
  }
  SignVector row(std::size_t r) const { return SignVector(row_words(r), length_); }
  std::size_t count_zeros(std::size_t r) const;
  std::size_t count_zeros(std::size_t r, std::size_t prefix) const {
    return row(r).count_zeros(prefix);
  }

  std::size_t push_row(const SignVector& sv);
  // Copies the first words_for(length()) words; entries past length() must be
  // zero in the source.
  std::size_t push_row_words(std::span<const std::uint64_t> words);
  // Grows every row by one entry, initialised to Minus.
  void add_column();
  void reserve_length(std::size_t length);
  void reserve_rows(std::size_t rows) { data_.reserve(rows * stride_); }
  // Keeps the listed rows, in the given order.
  void select_rows(std::span<const std::uint32_t> keep);
  std::size_t bytes() const { return data_.capacity() * sizeof(std::uint64_t); }

 private:
  std::vector<std::uint64_t> data_;
  std::size_t stride_ = 1;
  std::size_t rows_ = 0;
  std::size_t length_ = 0;
};

// The 1-skeleton of the current complex as parallel arrays. Vertex and edge
// slots are append-only; removal only clears the alive flag until compact().
struct Skeleton {
  std::size_t dim = 0;
  std::size_t m = 0;
  std::size_t t = 0;

  std::vector<double> positions;
  SignTable vertex_signs;
  std::vector<std::uint8_t> vertex_alive;

  // (lo, hi) with lo < hi.
  std::vector<std::array<std::uint32_t, 2>> edges;
  SignTable edge_signs;
  std::vector<std::uint8_t> edge_alive;

  std::size_t sign_length() const { return m + t; }
  std::size_t vertex_slots() const { return vertex_alive.size(); }
  std::size_t edge_slots() const { return edge_alive.size(); }
  std::size_t vertex_count() const;
  std::size_t edge_count() const;

  std::span<const double> position(std::size_t v) const {
    return {positions.data() + v * dim, dim};
  }

  std::uint32_t add_vertex(std::span<const double> pos, const SignVector& sv);
  std::uint32_t add_edge(std::uint32_t a, std::uint32_t b, const SignVector& sv);

  std::size_t memory_bytes() const;
};

struct InitialComplex {
  Domain domain;
  Skeleton skeleton;
};

// Facets ordered x_0 >= lo, x_0 <= hi, x_1 >= lo, ... Vertex ids are corner
// bitmasks (bit j set: x_j = hi).
InitialComplex init_hypercube(std::size_t dim, double lo, double hi);

// {x_j >= -scale for all j} and {sum_j x_j <= scale * dim}. Vertex 0 is
// (-scale, ..., -scale); vertex i has x_{i-1} = scale * (2 dim - 1) and -scale
// elsewhere. Contains the origin.
InitialComplex init_simplex(std::size_t dim, double scale);

// Removes dead cells and renumbers densely in ascending original id. When
// vertex_remap is given it receives old -> new ids (UINT32_MAX for removed).
Skeleton compact(const Skeleton& sk, std::vector<std::uint32_t>* vertex_remap = nullptr);

// Checks the structural invariants: alive edges reference alive vertices,
// vertex (edge) sign-vectors have dim (dim - 1) zeros, edge signs agree with
// their endpoints, lengths are m + t.
std::optional<std::string> find_invariant_violation(const Skeleton& sk);
void check_invariants(const Skeleton& sk);

}  // namespace edgesub
