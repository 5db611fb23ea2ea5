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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "edgesub/errors.hpp"
#include "edgesub/signvec.hpp"

using namespace edgesub;

namespace {

SignVector sv(const char* s) { return SignVector::from_string(s); }

SignVector random_sv(std::mt19937_64& rng, std::size_t n) {
  SignVector out(n, Sign::kPlus);
  for (std::size_t i = 0; i < n; ++i) out.set(i, static_cast<Sign>(rng() % 3));
  return out;
}

// Independent count of perturbation parents from the string form.
std::size_t expected_parents(const std::string& s, std::size_t m) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '0') n += i < m ? 1 : 2;
  return n;
}

}  // namespace

TEST_CASE("string round trip across word boundaries") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0, 1, 31, 32, 33, 64, 65, 200}) {
    const auto a = random_sv(rng, n);
    CHECK(SignVector::from_string(a.to_string()) == a);
    CHECK(a.size() == n);
  }
  CHECK(sv("+-0").to_string() == "+-0");
  CHECK_THROWS_AS(SignVector::from_string("+x"), InputError);
}

TEST_CASE("sign_of_value ties break negative and count near-zeros") {
  DegeneracyCounter counter;
  CHECK(sign_of_value(0.5, &counter) == Sign::kPlus);
  CHECK(sign_of_value(-0.5, &counter) == Sign::kMinus);
  CHECK(counter.count == 0);
  CHECK(sign_of_value(0.0, &counter) == Sign::kMinus);
  CHECK(counter.count == 1);
  CHECK(sign_of_value(1e-13, &counter) == Sign::kPlus);
  CHECK(counter.count == 2);
  CHECK(sign_of_value(-0.0) == Sign::kMinus);
  CHECK_THROWS_AS(sign_of_value(NAN), InvariantViolation);
}

TEST_CASE("append_sign and zero_positions") {
  CHECK(append_sign(sv("+-0"), Sign::kPlus) == sv("+-0+"));
  CHECK(append_sign(SignVector(), Sign::kZero) == sv("0"));
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_sv(rng, rng() % 80);
    const auto s = static_cast<Sign>(rng() % 3);
    const auto b = append_sign(a, s);
    CHECK(b[b.size() - 1] == s);
    CHECK(b.size() == a.size() + 1);
  }
  CHECK(zero_positions(sv("+0-0")) == std::vector<std::size_t>{1, 3});
  CHECK(zero_positions(sv("++")).empty());
}

TEST_CASE("count_zeros matches a character count") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_sv(rng, rng() % 150);
    const auto s = a.to_string();
    CHECK(a.count_zeros() == static_cast<std::size_t>(std::count(s.begin(), s.end(), '0')));
    const std::size_t prefix = a.size() ? rng() % (a.size() + 1) : 0;
    CHECK(a.count_zeros(prefix) ==
          static_cast<std::size_t>(std::count(s.begin(), s.begin() + prefix, '0')));
  }
}

TEST_CASE("perturb_parents examples") {
  const auto p = perturb_parents(sv("++++00"), 4);
  CHECK(p == std::vector<SignVector>{sv("+++++0"), sv("++++-0"), sv("++++0+"), sv("++++0-")});
  // Boundary vertex: one facet zero (z = 1) of two zeros.
  const auto q = perturb_parents(sv("0+++0-"), 4);
  CHECK(q == std::vector<SignVector>{sv("++++0-"), sv("0++++-"), sv("0+++--")});
  CHECK(perturb_parents(sv("++++00-0+"), 4).size() == 6);
  CHECK_THROWS_AS(perturb_parents(sv("+++"), 1), InputError);
}

TEST_CASE("perturb_parents count and zero-drop properties") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    auto a = random_sv(rng, 1 + rng() % 70);
    a.set(rng() % a.size(), Sign::kZero);
    const std::size_t m = rng() % (a.size() + 1);
    const auto parents = perturb_parents(a, m);
    REQUIRE(parents.size() == expected_parents(a.to_string(), m));
    CHECK(parent_count(a, m) == parents.size());
    for (const auto& p : parents) {
      CHECK(p.count_zeros() + 1 == a.count_zeros());
      CHECK(p.size() == a.size());
    }
  }
}

TEST_CASE("edge_sign_from_vertices") {
  CHECK(edge_sign_from_vertices(sv("0+"), sv("00")) == sv("0+"));
  CHECK_THROWS_AS(edge_sign_from_vertices(sv("+-"), sv("--")), InvariantViolation);
  CHECK_THROWS_AS(edge_sign_from_vertices(sv("+"), sv("++")), InputError);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_sv(rng, rng() % 100);
    CHECK(edge_sign_from_vertices(a, a) == a);
  }
}

TEST_CASE("ordering is lexicographic in Minus < Zero < Plus") {
  std::mt19937_64 rng(6);
  auto rank = [](char c) { return c == '-' ? 0 : c == '0' ? 1 : 2; };
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_sv(rng, rng() % 70);
    auto b = random_sv(rng, rng() % 70);
    if (i % 3 == 0) b = a;
    const auto sa = a.to_string(), sb = b.to_string();
    const bool less = std::lexicographical_compare(
        sa.begin(), sa.end(), sb.begin(), sb.end(),
        [&](char x, char y) { return rank(x) < rank(y); });
    CHECK((a < b) == less);
    CHECK((a == b) == (sa == sb));
  }
}

TEST_CASE("CellKey is injective, decodable and order-consistent") {
  std::mt19937_64 rng(7);
  std::set<std::string> strings;
  std::set<std::string> keys;
  for (int i = 0; i < 3000; ++i) {
    const auto a = random_sv(rng, rng() % 12);
    const auto k = a.key();
    CHECK(k.decode() == a);
    strings.insert(a.to_string());
    keys.insert(k.bytes());
    const auto b = random_sv(rng, a.size());
    CHECK(((a <=> b) == (k <=> b.key())));
  }
  CHECK(strings.size() == keys.size());
  // "-" and "--" differ only by length.
  CHECK_FALSE(sv("-").key() == sv("--").key());
  CHECK(SignVector(CellKey::kMaxLength, Sign::kZero).key().decode().size() == CellKey::kMaxLength);
  CHECK_THROWS_AS(CellKey(SignVector(CellKey::kMaxLength + 1, Sign::kPlus)), InputError);
}

TEST_CASE("hash agrees with equality") {
  std::unordered_set<SignVector> set;
  set.insert(sv("+0-"));
  set.insert(sv("+0-"));
  set.insert(sv("+0"));
  CHECK(set.size() == 2);
  // Construction from raw words masks the entries past the size.
  const std::vector<std::uint64_t> all_plus{0xAAAAAAAAAAAAAAAAULL};
  CHECK(SignVector(all_plus, 3) == sv("+++"));
  CHECK(std::hash<SignVector>{}(SignVector(all_plus, 3)) == std::hash<SignVector>{}(sv("+++")));
}
