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

#include <stdexcept>
#include <string>

namespace edgesub {

// Bad user input: malformed files, invalid sizes, out-of-range indices.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that succeeded but produced nothing to report, e.g. a level
// set that does not intersect the domain.
class EmptyResultError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The complex is corrupt or the network is not generic enough to be handled.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A 2-face key produced while pairing splitting edges did not occur exactly twice.
class PairingError : public InvariantViolation {
 public:
  PairingError(const std::string& key, std::size_t multiplicity)
      : InvariantViolation("2-face " + key + " has multiplicity " +
                           std::to_string(multiplicity) + " (expected 2)"),
        key_(key),
        multiplicity_(multiplicity) {}

  const std::string& key() const { return key_; }
  std::size_t multiplicity() const { return multiplicity_; }

 private:
  std::string key_;
  std::size_t multiplicity_;
};

}  // namespace edgesub
