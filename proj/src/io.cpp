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

#include "edgesub/io.hpp"

#include <charconv>
#include <fstream>

#include "edgesub/errors.hpp"

namespace edgesub {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw InvariantViolation("cannot format number");
  return std::string(buf, end);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

std::string iteration_json_line(const IterationStats& s) {
  std::string line = "{\"iteration\":" + std::to_string(s.iteration) +
                     ",\"layer\":" + std::to_string(s.neuron.layer) +
                     ",\"index\":" + std::to_string(s.neuron.index) +
                     ",\"vertices_before\":" + std::to_string(s.vertices_before) +
                     ",\"edges_before\":" + std::to_string(s.edges_before) +
                     ",\"vertices_after\":" + std::to_string(s.vertices_after) +
                     ",\"edges_after\":" + std::to_string(s.edges_after) +
                     ",\"splitting_edges\":" + std::to_string(s.splitting_edges) +
                     ",\"intersecting_edges\":" + std::to_string(s.intersecting_edges) +
                     ",\"degenerate\":" + std::to_string(s.degenerate) +
                     ",\"seconds\":" + format_double(s.seconds) +
                     ",\"memory_bytes\":" + std::to_string(s.memory_bytes) + "}\n";
  return line;
}

}  // namespace edgesub
