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

#include <filesystem>
#include <string>

#include "edgesub/subdivide.hpp"

namespace edgesub {

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

// One JSON object per line, keys in a fixed order.
std::string iteration_json_line(const IterationStats& stats);

}  // namespace edgesub
