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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edgesub {

// Ordered Minus < Zero < Plus. The numeric values are the packed 2-bit codes.
enum class Sign : std::uint8_t { kMinus = 0, kZero = 1, kPlus = 2 };

char to_char(Sign s);
Sign sign_from_char(char c);

class CellKey;

// A string over {-, 0, +} packed two bits per entry, most significant bits
// first within each 64-bit word. Unused trailing bits are zero, so comparing
// words compares lexicographically.
class SignVector {
 public:
  static constexpr std::size_t kPerWord = 32;

  SignVector() = default;
  SignVector(std::size_t size, Sign fill);
  SignVector(std::span<const std::uint64_t> words, std::size_t size);

  static SignVector from_string(std::string_view text);
  std::string to_string() const;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  Sign operator[](std::size_t i) const {
    return static_cast<Sign>((words_[i / kPerWord] >> shift(i)) & 3u);
  }
  void set(std::size_t i, Sign s) {
    auto& w = words_[i / kPerWord];
    w = (w & ~(std::uint64_t{3} << shift(i))) |
        (std::uint64_t{static_cast<std::uint8_t>(s)} << shift(i));
  }
  void push_back(Sign s);

  std::size_t count_zeros() const;
  // Zeros among entries [0, prefix).
  std::size_t count_zeros(std::size_t prefix) const;

  std::span<const std::uint64_t> words() const { return words_; }
  CellKey key() const;

  friend bool operator==(const SignVector& a, const SignVector& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }
  friend std::strong_ordering operator<=>(const SignVector& a, const SignVector& b);

  static constexpr unsigned shift(std::size_t i) {
    return 62u - 2u * static_cast<unsigned>(i % kPerWord);
  }
  static constexpr std::size_t words_for(std::size_t n) {
    return (n + kPerWord - 1) / kPerWord;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

// Number of Zero codes in a packed word (padding entries are Minus).
inline std::size_t zeros_in_word(std::uint64_t w) {
  return static_cast<std::size_t>(
      __builtin_popcountll(w & ~(w >> 1) & 0x5555555555555555ULL));
}

std::uint64_t hash_words(std::span<const std::uint64_t> words, std::size_t size);

// Canonical bytes: 16-bit big-endian length followed by the packed entries.
// Equal keys iff equal sign-vectors; keys of equal length order like their
// sign-vectors.
class CellKey {
 public:
  static constexpr std::size_t kMaxLength = 0xFFFF;

  explicit CellKey(const SignVector& sv);
  SignVector decode() const;
  const std::string& bytes() const { return bytes_; }

  friend bool operator==(const CellKey&, const CellKey&) = default;
  friend std::strong_ordering operator<=>(const CellKey& a, const CellKey& b) {
    return a.bytes_.compare(b.bytes_) <=> 0;
  }

 private:
  std::string bytes_;
};

// Counts evaluations that landed within epsilon of a hyperplane.
struct DegeneracyCounter {
  double epsilon = 1e-12;
  std::size_t count = 0;
};

// Plus if v > 0, Minus otherwise. Never yields Zero; zeros are only assigned
// structurally to vertices created on a hyperplane.
Sign sign_of_value(double v, DegeneracyCounter* degeneracy = nullptr);

SignVector append_sign(SignVector sv, Sign s);

std::vector<std::size_t> zero_positions(const SignVector& sv);

// Parent cells one dimension up: each Zero is perturbed to Plus and Minus,
// except Zeros among the first m (domain facet) entries, which only go to
// Plus. Yields z + 2(Z - z) vectors in ascending zero-index order, Plus before
// Minus.
std::vector<SignVector> perturb_parents(const SignVector& sv, std::size_t m);
std::size_t parent_count(const SignVector& sv, std::size_t m);

// Sign-vector of the edge spanned by two vertices: Zero where both are Zero,
// otherwise the non-Zero sign present. Throws InvariantViolation on opposite
// signs.
SignVector edge_sign_from_vertices(const SignVector& a, const SignVector& b);

}  // namespace edgesub

template <>
struct std::hash<edgesub::SignVector> {
  std::size_t operator()(const edgesub::SignVector& sv) const noexcept {
    return static_cast<std::size_t>(edgesub::hash_words(sv.words(), sv.size()));
  }
};
