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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edgesub/model.hpp"
#include "edgesub/signvec.hpp"
#include "edgesub/skeleton.hpp"

namespace edgesub {

// The cells of a skeleton lying on the output's zero level set.
struct BoundaryMesh {
  std::size_t dim = 0;
  std::size_t m = 0;
  std::size_t out_entry = 0;
  std::vector<double> positions;
  std::vector<SignVector> vertex_signs;
  std::vector<std::uint32_t> vertex_origin;  // skeleton vertex id
  std::vector<std::array<std::uint32_t, 2>> edges;
  std::vector<SignVector> edge_signs;
  // D = 3 only: convex polygon loops over mesh vertex ids, counter-clockwise
  // seen from the positive output side.
  std::vector<std::vector<std::uint32_t>> faces;

  std::size_t vertex_count() const { return vertex_signs.size(); }
  std::size_t edge_count() const { return edges.size(); }
  std::span<const double> position(std::size_t v) const {
    return {positions.data() + v * dim, dim};
  }
};

BoundaryMesh boundary_subcomplex(const Skeleton& sk, std::size_t out_entry);

// Builds the level-set polygons of a D = 3 mesh. Orientation uses the output
// gradient of `model`.
BoundaryMesh assemble_faces(BoundaryMesh mesh, const MlpSpec& model,
                            std::size_t output_index = 0);

struct ShapeMetrics {
  double area = 0.0;
  double perimeter = 0.0;
  double compactness = 0.0;
};

double compactness(double area, double perimeter);

// D = 2. Perimeter sums level-set edges; area sums the regions on the inside
// (negative output unless inside_negative is false).
ShapeMetrics area_perimeter_2d(const Skeleton& sk, std::size_t out_entry, std::size_t m,
                               bool inside_negative = true);

// Same inside area as area_perimeter_2d, computed instead from the oriented
// boundary of the inside set (level-set edges plus domain-facet edges).
double inside_area_from_boundary_2d(const Skeleton& sk, const MlpSpec& model,
                                    const Domain& domain, std::size_t out_entry,
                                    std::size_t output_index = 0, bool inside_negative = true);

// Area of a convex polygon given its vertices in any order.
double convex_polygon_area(const std::vector<std::array<double, 2>>& points);

struct DistanceHistogram {
  double max_r = 0.0;
  std::vector<double> r;
  std::vector<std::uint8_t> on_boundary;
  // Bin b covers r / max_r in [b / bins, (b + 1) / bins).
  std::vector<std::size_t> interior;
  std::vector<std::size_t> boundary;
  double interior_fraction = 0.0;
  double boundary_fraction = 0.0;
};

// r = |x|_2 per alive vertex. A vertex is a boundary vertex iff one of its
// first m signs is Zero.
DistanceHistogram distance_histogram(const Skeleton& sk, std::size_t bins = 64);

std::string obj_text(const BoundaryMesh& mesh);
void export_obj(const BoundaryMesh& mesh, const std::filesystem::path& path);

std::string svg_text(const Skeleton& sk, const Domain& domain,
                     std::optional<std::size_t> out_entry = std::nullopt);
void export_svg(const Skeleton& sk, const Domain& domain, std::optional<std::size_t> out_entry,
                const std::filesystem::path& path);

std::string vertices_csv(const Skeleton& sk);
std::string edges_csv(const Skeleton& sk);
// Writes vertices.csv and edges.csv into `dir`.
void export_csv(const Skeleton& sk, const std::filesystem::path& dir);

}  // namespace edgesub
