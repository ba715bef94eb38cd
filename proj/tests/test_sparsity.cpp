/*
   Copyright 2026 The sparsecert Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "sparsecert/sparsity.hpp"
#include "test_util.hpp"

using namespace sparsecert;

namespace {

Polynomial X(int nvars, int var) { return Polynomial::variable(nvars, var); }

SparsityPattern pattern_of(int nvars, std::vector<std::vector<int>> raw) {
  std::vector<BlockIndexSet> blocks;
  for (auto& b : raw) blocks.emplace_back(std::move(b));
  return SparsityPattern(nvars, std::move(blocks));
}

// Independent validity check used as the oracle: for each position, the
// intersection with everything earlier must sit inside one earlier block.
bool oracle_valid(const std::vector<BlockIndexSet>& blocks,
                  const std::vector<int>& order) {
  std::set<int> seen;
  for (size_t t = 0; t < order.size(); ++t) {
    const auto& idx = blocks[order[t] - 1].indices();
    if (t > 0) {
      std::set<int> inter;
      for (int v : idx) {
        if (seen.count(v)) inter.insert(v);
      }
      bool ok = false;
      for (size_t u = 0; u < t && !ok; ++u) {
        const auto& prev = blocks[order[u] - 1].indices();
        ok = std::all_of(inter.begin(), inter.end(), [&](int v) {
          return std::find(prev.begin(), prev.end(), v) != prev.end();
        });
      }
      if (!ok) return false;
    }
    seen.insert(idx.begin(), idx.end());
  }
  return true;
}

bool oracle_exists(const std::vector<BlockIndexSet>& blocks) {
  std::vector<int> order(blocks.size());
  std::iota(order.begin(), order.end(), 1);
  do {
    if (oracle_valid(blocks, order)) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

}  // namespace

TEST_CASE("running intersection holds on a chain") {
  const auto p = pattern_of(4, {{1, 2}, {2, 3}, {3, 4}});
  const RipReport r = check_rip(p);
  CHECK(r.holds);
  CHECK(r.witness[2] == 1);
  CHECK(r.witness[3] == 2);
  CHECK(r.violating_index == 0);
}

TEST_CASE("running intersection fails when the overlap straddles blocks") {
  const auto p = pattern_of(4, {{1, 2}, {3, 4}, {1, 3}});
  const RipReport r = check_rip(p);
  CHECK(!r.holds);
  CHECK(r.violating_index == 3);
}

TEST_CASE("running intersection is vacuous for one or two blocks") {
  CHECK(check_rip(pattern_of(3, {{1, 2, 3}})).holds);
  CHECK(check_rip(pattern_of(4, {{1, 2}, {3, 4}})).holds);
  CHECK(check_rip(SparsityPattern(3, {})).holds);
}

TEST_CASE("order search fixes a reorderable family") {
  std::vector<BlockIndexSet> blocks = {BlockIndexSet({1, 2}), BlockIndexSet({3, 4}),
                                       BlockIndexSet({1, 3})};
  const auto order = find_rip_order(blocks);
  REQUIRE(order.has_value());
  CHECK(*order == std::vector<int>{1, 3, 2});
  CHECK(oracle_valid(blocks, *order));
}

TEST_CASE("order search keeps r <= 2 as-is") {
  std::vector<BlockIndexSet> blocks = {BlockIndexSet({1, 2}), BlockIndexSet({2, 3})};
  const auto order = find_rip_order(blocks);
  REQUIRE(order.has_value());
  CHECK(*order == std::vector<int>{1, 2});
}

TEST_CASE("order search handles a star family") {
  std::vector<BlockIndexSet> blocks = {BlockIndexSet({1, 2}), BlockIndexSet({3, 4}),
                                       BlockIndexSet({5, 6}), BlockIndexSet({1, 3, 5})};
  const auto order = find_rip_order(blocks);
  REQUIRE(order.has_value());
  CHECK(oracle_valid(blocks, *order));
}

TEST_CASE("order search reports unorderable families") {
  std::vector<BlockIndexSet> blocks = {BlockIndexSet({1, 2}), BlockIndexSet({3, 4}),
                                       BlockIndexSet({5, 6}), BlockIndexSet({1, 3}),
                                       BlockIndexSet({3, 5}), BlockIndexSet({1, 5})};
  CHECK(!oracle_exists(blocks));
  CHECK(!find_rip_order(blocks).has_value());
}

TEST_CASE("order search agrees with brute force on random families") {
  std::mt19937 rng(5150);
  std::uniform_int_distribution<int> rdist(1, 6);
  std::uniform_int_distribution<int> vdist(1, 8);
  std::uniform_int_distribution<int> sdist(1, 3);
  for (int iter = 0; iter < 150; ++iter) {
    const int r = rdist(rng);
    std::vector<BlockIndexSet> blocks;
    for (int j = 0; j < r; ++j) {
      std::set<int> vars;
      const int sz = sdist(rng);
      while (static_cast<int>(vars.size()) < sz) vars.insert(vdist(rng));
      blocks.emplace_back(std::vector<int>(vars.begin(), vars.end()));
    }
    const bool exists = oracle_exists(blocks);
    const auto order = find_rip_order(blocks);
    CHECK(order.has_value() == exists);
    if (order) CHECK(oracle_valid(blocks, *order));
  }
}

TEST_CASE("summand assignment uses first fit") {
  const auto pat = pattern_of(3, {{1, 2}, {2, 3}});
  const Polynomial f1 = X(3, 1) * X(3, 2);
  const Polynomial f2 = X(3, 2) * X(3, 3);
  const auto parts = assign_summands({f1, f2}, pat);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == f1);
  CHECK(parts[1] == f2);

  const auto only_x2 = assign_summands({X(3, 2)}, pat);
  CHECK(only_x2[0] == X(3, 2));
  CHECK(only_x2[1].is_zero());
}

TEST_CASE("summand assignment rejects uncovered supports") {
  const auto pat = pattern_of(3, {{1, 2}, {2, 3}});
  CHECK_THROWS_AS(assign_summands({X(3, 1) * X(3, 3)}, pat), InputError);
}

TEST_CASE("summand assignment conserves the sum") {
  std::mt19937 rng(31337);
  const auto pat = pattern_of(5, {{1, 2}, {2, 3}, {3, 4, 5}});
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<Polynomial> summands;
    Polynomial total(5);
    std::uniform_int_distribution<int> which(0, 2);
    for (int s = 0; s < 4; ++s) {
      const int j = which(rng);
      // Build a polynomial inside block j's variables.
      const auto& vars = pat.block(j + 1).indices();
      Polynomial p(5);
      std::uniform_int_distribution<int> cdist(-5, 5);
      std::uniform_int_distribution<int> edist(0, 2);
      for (int t = 0; t < 3; ++t) {
        std::vector<Monomial::Factor> factors;
        for (int v : vars) {
          const int e = edist(rng);
          if (e) factors.emplace_back(v, e);
        }
        p += Polynomial::monomial_term(5, Monomial(factors), Rational(cdist(rng)));
      }
      summands.push_back(p);
      total += p;
    }
    const auto parts = assign_summands(summands, pat);
    Polynomial back(5);
    for (const auto& q : parts) back += q;
    CHECK(back == total);
  }
}

TEST_CASE("block extraction on a coupling chain") {
  const Polynomial f = X(3, 1) * X(3, 2) + X(3, 2) * X(3, 3);
  const auto pat = extract_blocks(f, {});
  REQUIRE(pat.size() == 2);
  std::set<std::vector<int>> got = {pat.block(1).indices(), pat.block(2).indices()};
  std::set<std::vector<int>> want = {{1, 2}, {2, 3}};
  CHECK(got == want);
  CHECK(check_rip(pat).holds);
}

TEST_CASE("block extraction splits uncoupled variables") {
  const Polynomial f = X(2, 1) + X(2, 2);
  const auto pat = extract_blocks(f, {});
  REQUIRE(pat.size() == 2);
  std::set<std::vector<int>> got = {pat.block(1).indices(), pat.block(2).indices()};
  std::set<std::vector<int>> want = {{1}, {2}};
  CHECK(got == want);
}

TEST_CASE("block extraction merges a complete coupling") {
  Polynomial f(3);
  for (int a = 1; a <= 3; ++a) {
    for (int b = a + 1; b <= 3; ++b) f += X(3, a) * X(3, b);
  }
  const auto pat = extract_blocks(f, {});
  REQUIRE(pat.size() == 1);
  CHECK(pat.block(1).indices() == std::vector<int>{1, 2, 3});
}

TEST_CASE("constraints couple their whole support") {
  const Polynomial f = X(4, 1) + X(4, 4);
  const Polynomial g =
      Polynomial::constant(4, Rational(1)) - X(4, 1) * X(4, 1) - X(4, 2) * X(4, 2);
  const auto pat = extract_blocks(f, {g});
  CHECK(check_rip(pat).holds);
  std::set<int> covered;
  for (const auto& b : pat.blocks()) {
    covered.insert(b.indices().begin(), b.indices().end());
  }
  CHECK(covered == std::set<int>{1, 2, 4});
}

TEST_CASE("extraction output always passes the order check") {
  std::mt19937 rng(2024);
  for (int iter = 0; iter < 60; ++iter) {
    const Polynomial f = testutil::random_polynomial(rng, 6, 3, 8);
    const Polynomial g = testutil::random_polynomial(rng, 6, 2, 3);
    const auto pat = extract_blocks(f, {g});
    CHECK(check_rip(pat).holds);
    std::set<int> covered;
    for (const auto& b : pat.blocks()) {
      covered.insert(b.indices().begin(), b.indices().end());
    }
    for (int v : f.support_vars()) CHECK(covered.count(v) == 1);
    for (int v : g.support_vars()) CHECK(covered.count(v) == 1);
  }
}
