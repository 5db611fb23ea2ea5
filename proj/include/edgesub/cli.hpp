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

#include <string>
#include <vector>

namespace edgesub {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitEmptyResult = 3,
  kExitInvariantViolation = 4,
};

// Subcommands: extract, count, boundary, prune-model, validate, bench.
int run_cli(int argc, const char* const* argv);
// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace edgesub
