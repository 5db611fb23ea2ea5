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

#include "edgesub/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "edgesub/errors.hpp"
#include "edgesub/io.hpp"
#include "edgesub/poset.hpp"

namespace edgesub {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

BoundaryMesh boundary_subcomplex(const Skeleton& sk, std::size_t out_entry) {
  if (out_entry >= sk.sign_length())
    throw InputError("output entry " + std::to_string(out_entry) + " out of range (length " +
                     std::to_string(sk.sign_length()) + ")");
  BoundaryMesh mesh;
  mesh.dim = sk.dim;
  mesh.m = sk.m;
  mesh.out_entry = out_entry;
  std::vector<std::uint32_t> local(sk.vertex_slots(), UINT32_MAX);
  for (std::uint32_t v = 0; v < sk.vertex_slots(); ++v) {
    if (!sk.vertex_alive[v] || sk.vertex_signs.get(v, out_entry) != Sign::kZero) continue;
    local[v] = static_cast<std::uint32_t>(mesh.vertex_signs.size());
    auto p = sk.position(v);
    mesh.positions.insert(mesh.positions.end(), p.begin(), p.end());
    mesh.vertex_signs.push_back(sk.vertex_signs.row(v));
    mesh.vertex_origin.push_back(v);
  }
  for (std::uint32_t e = 0; e < sk.edge_slots(); ++e) {
    if (!sk.edge_alive[e] || sk.edge_signs.get(e, out_entry) != Sign::kZero) continue;
    const auto [a, b] = sk.edges[e];
    if (local[a] == UINT32_MAX || local[b] == UINT32_MAX)
      throw InvariantViolation("level-set edge with an endpoint off the level set");
    mesh.edges.push_back({local[a], local[b]});
    mesh.edge_signs.push_back(sk.edge_signs.row(e));
  }
  return mesh;
}

BoundaryMesh assemble_faces(BoundaryMesh mesh, const MlpSpec& model, std::size_t output_index) {
  if (mesh.dim != 3) throw InputError("assemble_faces needs D = 3");
  // Parents within the level set: perturb the edge's other zero.
  std::map<SignVector, std::vector<std::uint32_t>> face_edges;
  for (std::uint32_t e = 0; e < mesh.edge_count(); ++e) {
    SignVector sv = mesh.edge_signs[e];
    std::size_t other = sv.size();
    for (std::size_t j = 0; j < sv.size(); ++j)
      if (sv[j] == Sign::kZero && j != mesh.out_entry) other = j;
    if (other == sv.size()) throw InvariantViolation("level-set edge with a single zero");
    sv.set(other, Sign::kPlus);
    face_edges[sv].push_back(e);
    if (other >= mesh.m) {
      sv.set(other, Sign::kMinus);
      face_edges[sv].push_back(e);
    }
  }

  mesh.faces.clear();
  for (const auto& [face, edges] : face_edges) {
    std::vector<std::uint32_t> verts;
    for (auto e : edges) {
      verts.push_back(mesh.edges[e][0]);
      verts.push_back(mesh.edges[e][1]);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    if (verts.size() < 3) throw InvariantViolation("level-set face with fewer than 3 vertices");

    std::array<double, 3> c{0, 0, 0};
    for (auto v : verts)
      for (int k = 0; k < 3; ++k) c[k] += mesh.position(v)[k] / static_cast<double>(verts.size());
    const auto g = output_gradient(model, c, output_index);
    std::array<double, 3> n{g[0], g[1], g[2]};
    const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (!(norm > 0.0)) throw InvariantViolation("level-set face with zero output gradient");
    for (auto& x : n) x /= norm;

    const std::array<double, 3> axis =
        std::abs(n[0]) < 0.9 ? std::array<double, 3>{1, 0, 0} : std::array<double, 3>{0, 1, 0};
    auto u = cross(n, axis);
    const double un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (auto& x : u) x /= un;
    const auto w = cross(n, u);

    double diameter = 0.0;
    std::vector<std::pair<double, std::uint32_t>> by_angle;
    for (auto v : verts) {
      const auto p = mesh.position(v);
      const std::array<double, 3> d{p[0] - c[0], p[1] - c[1], p[2] - c[2]};
      diameter = std::max(diameter, std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
      by_angle.emplace_back(std::atan2(dot(d, w), dot(d, u)), v);
    }
    const double tol = 1e-9 * std::max(1.0, diameter);
    for (auto v : verts) {
      const auto p = mesh.position(v);
      const std::array<double, 3> d{p[0] - c[0], p[1] - c[1], p[2] - c[2]};
      if (std::abs(dot(d, n)) > tol)
        throw InvariantViolation("non-planar level-set face " + face.to_string());
    }
    std::sort(by_angle.begin(), by_angle.end());
    std::vector<std::uint32_t> loop;
    for (const auto& [angle, v] : by_angle) loop.push_back(v);
    mesh.faces.push_back(std::move(loop));
  }
  return mesh;
}

double compactness(double area, double perimeter) {
  if (area == 0.0) return 0.0;
  if (!(perimeter > 0.0)) throw InputError("compactness needs a positive perimeter");
  return 4.0 * std::numbers::pi * area / (perimeter * perimeter);
}

double convex_polygon_area(const std::vector<std::array<double, 2>>& points) {
  if (points.size() < 3) return 0.0;
  double cx = 0.0, cy = 0.0;
  for (const auto& p : points) {
    cx += p[0];
    cy += p[1];
  }
  cx /= static_cast<double>(points.size());
  cy /= static_cast<double>(points.size());
  auto sorted = points;
  std::sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) {
    return std::atan2(a[1] - cy, a[0] - cx) < std::atan2(b[1] - cy, b[0] - cx);
  });
  double twice = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& a = sorted[i];
    const auto& b = sorted[(i + 1) % sorted.size()];
    twice += (a[0] - cx) * (b[1] - cy) - (b[0] - cx) * (a[1] - cy);
  }
  return std::abs(twice) / 2.0;
}

ShapeMetrics area_perimeter_2d(const Skeleton& sk, std::size_t out_entry, std::size_t m,
                               bool inside_negative) {
  if (sk.dim != 2) throw InputError("area_perimeter_2d needs D = 2");
  if (out_entry >= sk.sign_length()) throw InputError("output entry out of range");
  ShapeMetrics metrics;
  std::size_t boundary_edges = 0;
  for (std::size_t e = 0; e < sk.edge_slots(); ++e) {
    if (!sk.edge_alive[e] || sk.edge_signs.get(e, out_entry) != Sign::kZero) continue;
    metrics.perimeter += distance(sk.position(sk.edges[e][0]), sk.position(sk.edges[e][1]));
    ++boundary_edges;
  }
  if (boundary_edges == 0) throw EmptyResultError("empty level set");

  const Sign inside = inside_negative ? Sign::kMinus : Sign::kPlus;
  PosetOptions opts;
  opts.keep_children = true;
  const CellSet edges = edge_cells(sk);
  const CellSet regions = build_parent_cells(edges, m, opts);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (regions.signs[r][out_entry] != inside) continue;
    std::vector<std::uint32_t> verts;
    for (auto child : regions.children[r]) {
      const auto& edge = sk.edges[edges.origin[child]];
      verts.push_back(edge[0]);
      verts.push_back(edge[1]);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    std::vector<std::array<double, 2>> points;
    for (auto v : verts) points.push_back({sk.position(v)[0], sk.position(v)[1]});
    metrics.area += convex_polygon_area(points);
  }
  metrics.compactness = compactness(metrics.area, metrics.perimeter);
  return metrics;
}

double inside_area_from_boundary_2d(const Skeleton& sk, const MlpSpec& model,
                                    const Domain& domain, std::size_t out_entry,
                                    std::size_t output_index, bool inside_negative) {
  if (sk.dim != 2) throw InputError("inside_area_from_boundary_2d needs D = 2");
  const Sign inside = inside_negative ? Sign::kMinus : Sign::kPlus;
  // Divergence theorem: A = 1/2 sum over boundary segments of len * (x . n).
  double area = 0.0;
  for (std::size_t e = 0; e < sk.edge_slots(); ++e) {
    if (!sk.edge_alive[e]) continue;
    const auto a = sk.position(sk.edges[e][0]);
    const auto b = sk.position(sk.edges[e][1]);
    const double len = distance(a, b);
    if (len == 0.0) continue;
    std::array<double, 2> normal{};
    const Sign s = sk.edge_signs.get(e, out_entry);
    if (s == Sign::kZero) {
      normal = {(b[1] - a[1]) / len, -(b[0] - a[0]) / len};
      const std::array<double, 2> mid{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
      const auto g = output_gradient(model, mid, output_index);
      // Outward from the inside set means toward the other side.
      const double toward = normal[0] * g[0] + normal[1] * g[1];
      if ((toward < 0) == inside_negative) normal = {-normal[0], -normal[1]};
    } else if (s == inside) {
      std::size_t facet = sk.m;
      for (std::size_t j = 0; j < sk.m; ++j)
        if (sk.edge_signs.get(e, j) == Sign::kZero) facet = j;
      if (facet == sk.m) continue;
      const auto& w = domain.facets[facet].normal;
      const double wn = std::sqrt(w[0] * w[0] + w[1] * w[1]);
      normal = {-w[0] / wn, -w[1] / wn};
    } else {
      continue;
    }
    area += 0.5 * len * (a[0] * normal[0] + a[1] * normal[1]);
  }
  return area;
}

DistanceHistogram distance_histogram(const Skeleton& sk, std::size_t bins) {
  if (bins == 0) throw InputError("histogram needs at least one bin");
  DistanceHistogram h;
  h.interior.assign(bins, 0);
  h.boundary.assign(bins, 0);
  for (std::size_t v = 0; v < sk.vertex_slots(); ++v) {
    if (!sk.vertex_alive[v]) continue;
    const auto p = sk.position(v);
    h.r.push_back(std::sqrt(dot(p, p)));
    h.on_boundary.push_back(sk.vertex_signs.count_zeros(v, sk.m) > 0);
    h.max_r = std::max(h.max_r, h.r.back());
  }
  if (h.r.empty()) return h;
  std::size_t nb = 0;
  for (std::size_t i = 0; i < h.r.size(); ++i) {
    const double x = h.max_r > 0 ? h.r[i] / h.max_r : 0.0;
    const auto b = std::min(bins - 1, static_cast<std::size_t>(x * static_cast<double>(bins)));
    (h.on_boundary[i] ? h.boundary : h.interior)[b]++;
    nb += h.on_boundary[i];
  }
  h.boundary_fraction = static_cast<double>(nb) / static_cast<double>(h.r.size());
  h.interior_fraction = 1.0 - h.boundary_fraction;
  return h;
}

std::string obj_text(const BoundaryMesh& mesh) {
  std::ostringstream out;
  out << "# level set: " << mesh.vertex_count() << " vertices, " << mesh.faces.size()
      << " faces\n";
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    out << 'v';
    for (double x : mesh.position(v)) out << ' ' << format_double(x);
    out << '\n';
  }
  for (const auto& face : mesh.faces) {
    out << 'f';
    for (auto v : face) out << ' ' << v + 1;
    out << '\n';
  }
  return out.str();
}

void export_obj(const BoundaryMesh& mesh, const std::filesystem::path& path) {
  write_text(path, obj_text(mesh));
}

std::string svg_text(const Skeleton& sk, const Domain& domain,
                     std::optional<std::size_t> out_entry) {
  if (sk.dim != 2) throw InputError("SVG export needs D = 2");
  if (out_entry && *out_entry >= sk.sign_length()) throw InputError("output entry out of range");
  const double x0 = domain.box_lo[0], y0 = domain.box_lo[1];
  const double w = domain.box_hi[0] - x0, h = domain.box_hi[1] - y0;
  const double light = std::max(w, h) / 500.0, heavy = std::max(w, h) / 100.0;
  std::ostringstream out;
  // y is flipped so the picture has the usual orientation.
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\""
      << format_double(x0) << ' ' << format_double(-(y0 + h)) << ' ' << format_double(w) << ' '
      << format_double(h) << "\">\n"
      << "<g class=\"edges\" stroke=\"#888888\" stroke-width=\"" << format_double(light)
      << "\" stroke-linecap=\"round\">\n";
  auto line = [&](std::size_t e) {
    const auto a = sk.position(sk.edges[e][0]);
    const auto b = sk.position(sk.edges[e][1]);
    out << "<line x1=\"" << format_double(a[0]) << "\" y1=\"" << format_double(-a[1])
        << "\" x2=\"" << format_double(b[0]) << "\" y2=\"" << format_double(-b[1]) << "\"/>\n";
  };
  for (std::size_t e = 0; e < sk.edge_slots(); ++e)
    if (sk.edge_alive[e]) line(e);
  out << "</g>\n";
  if (out_entry) {
    out << "<g class=\"boundary\" stroke=\"#000000\" stroke-width=\"" << format_double(heavy)
        << "\" stroke-linecap=\"round\">\n";
    for (std::size_t e = 0; e < sk.edge_slots(); ++e)
      if (sk.edge_alive[e] && sk.edge_signs.get(e, *out_entry) == Sign::kZero) line(e);
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void export_svg(const Skeleton& sk, const Domain& domain, std::optional<std::size_t> out_entry,
                const std::filesystem::path& path) {
  write_text(path, svg_text(sk, domain, out_entry));
}

std::string vertices_csv(const Skeleton& sk) {
  std::string out = "id";
  for (std::size_t k = 0; k < sk.dim; ++k) out += ",x" + std::to_string(k);
  out += ",signs\n";
  for (std::size_t v = 0; v < sk.vertex_slots(); ++v) {
    if (!sk.vertex_alive[v]) continue;
    out += std::to_string(v);
    for (double x : sk.position(v)) out += "," + format_double(x);
    out += "," + sk.vertex_signs.row(v).to_string() + "\n";
  }
  return out;
}

std::string edges_csv(const Skeleton& sk) {
  std::string out = "id,v_lo,v_hi,signs\n";
  for (std::size_t e = 0; e < sk.edge_slots(); ++e) {
    if (!sk.edge_alive[e]) continue;
    out += std::to_string(e) + "," + std::to_string(sk.edges[e][0]) + "," +
           std::to_string(sk.edges[e][1]) + "," + sk.edge_signs.row(e).to_string() + "\n";
  }
  return out;
}

void export_csv(const Skeleton& sk, const std::filesystem::path& dir) {
  write_text(dir / "vertices.csv", vertices_csv(sk));
  write_text(dir / "edges.csv", edges_csv(sk));
}

}  // namespace edgesub
