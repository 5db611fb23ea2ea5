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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "edgesub/model.hpp"

namespace edgesub::testing {

inline LayerSpec layer(std::size_t rows, std::size_t cols, std::vector<double> weights,
                       std::vector<double> bias) {
  return LayerSpec{rows, cols, std::move(weights), std::move(bias)};
}

// One hidden neuron x + y - 0.5 and a trivial output.
inline MlpSpec line_model() {
  MlpSpec m;
  m.in_dim = 2;
  m.layers = {layer(1, 2, {1, 1}, {-0.5}), layer(1, 1, {1}, {0})};
  return m;
}

// f(x, y) = |x| + |y| - 1 on [-2, 2]^2 with |x| = 2 relu(x) - relu(x + 3) + 3.
inline MlpSpec diamond_model() {
  MlpSpec m;
  m.in_dim = 2;
  m.layers = {layer(4, 2, {1, 0, 1, 0, 0, 1, 0, 1}, {0, 3, 0, 3}),
              layer(1, 4, {2, -1, 2, -1}, {5})};
  return m;
}

// Output z through one positive hidden unit: f = relu(z + 5) - 5.
inline MlpSpec plane_model() {
  MlpSpec m;
  m.in_dim = 3;
  m.layers = {layer(1, 3, {0, 0, 1}, {5}), layer(1, 1, {1}, {-5})};
  return m;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("edgesub_test_" + name + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace edgesub::testing
