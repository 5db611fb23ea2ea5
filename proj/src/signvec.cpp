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

#include "edgesub/signvec.hpp"

#include <algorithm>
#include <cmath>

#include "edgesub/errors.hpp"

namespace edgesub {

char to_char(Sign s) {
  switch (s) {
    case Sign::kMinus:
      return '-';
    case Sign::kZero:
      return '0';
    case Sign::kPlus:
      return '+';
  }
  return '?';
}

Sign sign_from_char(char c) {
  switch (c) {
    case '-':
      return Sign::kMinus;
    case '0':
      return Sign::kZero;
    case '+':
      return Sign::kPlus;
    default:
      throw InputError(std::string("invalid sign character '") + c + "'");
  }
}

SignVector::SignVector(std::size_t size, Sign fill) : words_(words_for(size), 0), size_(size) {
  if (fill != Sign::kMinus)
    for (std::size_t i = 0; i < size; ++i) set(i, fill);
}

SignVector::SignVector(std::span<const std::uint64_t> words, std::size_t size)
    : words_(words.begin(), words.begin() + words_for(size)), size_(size) {
  // Clear anything past the last entry so equality and ordering stay exact.
  if (size_ % kPerWord != 0) {
    const unsigned used = 2u * static_cast<unsigned>(size_ % kPerWord);
    words_.back() &= ~std::uint64_t{0} << (64u - used);
  }
}

SignVector SignVector::from_string(std::string_view text) {
  SignVector sv(text.size(), Sign::kMinus);
  for (std::size_t i = 0; i < text.size(); ++i) sv.set(i, sign_from_char(text[i]));
  return sv;
}

std::string SignVector::to_string() const {
  std::string out(size_, '?');
  for (std::size_t i = 0; i < size_; ++i) out[i] = to_char((*this)[i]);
  return out;
}

void SignVector::push_back(Sign s) {
  if (size_ % kPerWord == 0) words_.push_back(0);
  ++size_;
  set(size_ - 1, s);
}

std::size_t SignVector::count_zeros() const {
  std::size_t n = 0;
  for (auto w : words_) n += zeros_in_word(w);
  return n;
}

std::size_t SignVector::count_zeros(std::size_t prefix) const {
  prefix = std::min(prefix, size_);
  std::size_t n = 0;
  const std::size_t full = prefix / kPerWord;
  for (std::size_t w = 0; w < full; ++w) n += zeros_in_word(words_[w]);
  if (prefix % kPerWord != 0) {
    const unsigned used = 2u * static_cast<unsigned>(prefix % kPerWord);
    n += zeros_in_word(words_[full] & (~std::uint64_t{0} << (64u - used)));
  }
  return n;
}

std::strong_ordering operator<=>(const SignVector& a, const SignVector& b) {
  const std::size_t n = std::min(a.words_.size(), b.words_.size());
  for (std::size_t w = 0; w < n; ++w)
    if (a.words_[w] != b.words_[w]) return a.words_[w] <=> b.words_[w];
  // Equal over the common words: one is a prefix of the other (padding codes
  // equal Minus), so the shorter sorts first.
  return a.size_ <=> b.size_;
}

std::uint64_t hash_words(std::span<const std::uint64_t> words, std::size_t size) {
  std::uint64_t h = 0x84222325cbf29ce4ULL ^ size;
  for (auto w : words) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
  }
  return h;
}

CellKey SignVector::key() const { return CellKey(*this); }

CellKey::CellKey(const SignVector& sv) {
  if (sv.size() > kMaxLength) throw InputError("sign-vector too long for a CellKey");
  const std::size_t nbytes = (sv.size() + 3) / 4;
  bytes_.reserve(2 + nbytes);
  bytes_.push_back(static_cast<char>(sv.size() >> 8));
  bytes_.push_back(static_cast<char>(sv.size() & 0xFF));
  const auto words = sv.words();
  for (std::size_t b = 0; b < nbytes; ++b) {
    const std::uint64_t w = words[b / 8];
    bytes_.push_back(static_cast<char>((w >> (56 - 8 * (b % 8))) & 0xFF));
  }
}

SignVector CellKey::decode() const {
  const std::size_t n = (static_cast<std::size_t>(static_cast<unsigned char>(bytes_[0])) << 8) |
                        static_cast<unsigned char>(bytes_[1]);
  std::vector<std::uint64_t> words(SignVector::words_for(n), 0);
  for (std::size_t b = 2; b < bytes_.size(); ++b) {
    const std::size_t k = b - 2;
    words[k / 8] |= std::uint64_t{static_cast<unsigned char>(bytes_[b])} << (56 - 8 * (k % 8));
  }
  return SignVector(words, n);
}

Sign sign_of_value(double v, DegeneracyCounter* degeneracy) {
  if (!std::isfinite(v)) throw InvariantViolation("non-finite pre-activation");
  if (degeneracy != nullptr && std::abs(v) < degeneracy->epsilon) ++degeneracy->count;
  return v > 0.0 ? Sign::kPlus : Sign::kMinus;
}

SignVector append_sign(SignVector sv, Sign s) {
  sv.push_back(s);
  return sv;
}

std::vector<std::size_t> zero_positions(const SignVector& sv) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sv.size(); ++i)
    if (sv[i] == Sign::kZero) out.push_back(i);
  return out;
}

std::size_t parent_count(const SignVector& sv, std::size_t m) {
  const std::size_t total = sv.count_zeros();
  const std::size_t boundary = sv.count_zeros(m);
  return boundary + 2 * (total - boundary);
}

std::vector<SignVector> perturb_parents(const SignVector& sv, std::size_t m) {
  const auto zeros = zero_positions(sv);
  if (zeros.empty()) throw InputError("perturb_parents: cell has no zeros");
  std::vector<SignVector> out;
  out.reserve(2 * zeros.size());
  for (auto j : zeros) {
    out.push_back(sv);
    out.back().set(j, Sign::kPlus);
    if (j >= m) {
      out.push_back(sv);
      out.back().set(j, Sign::kMinus);
    }
  }
  return out;
}

SignVector edge_sign_from_vertices(const SignVector& a, const SignVector& b) {
  if (a.size() != b.size()) throw InputError("edge_sign_from_vertices: length mismatch");
  SignVector out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Sign sa = a[i], sb = b[i];
    if (sa == sb) continue;
    if (sa == Sign::kZero) {
      out.set(i, sb);
    } else if (sb != Sign::kZero) {
      throw InvariantViolation("vertices " + a.to_string() + " and " + b.to_string() +
                               " have opposite signs at entry " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace edgesub
