// Copyright 2026 The qubofp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "qubofp/errors.hpp"
#include "qubofp/qubo.hpp"
#include "qubofp/search.hpp"
#include "test_util.hpp"

namespace qubofp {
namespace {

std::uint64_t binomial_by_pascal(std::uint64_t n, std::uint64_t k) {
  std::vector<std::uint64_t> row(k + 1, 0);
  row[0] = 1;
  for (std::uint64_t i = 1; i <= n; ++i) {
    for (std::uint64_t j = std::min(i, k); j > 0; --j) row[j] += row[j - 1];
  }
  return row[k];
}

TEST(CountCombinations, KnownValues) {
  EXPECT_EQ(count_combinations(6, 2).exact_m, 15u);
  EXPECT_EQ(count_combinations(6, 2).cumulative, 21u);
  EXPECT_EQ(count_combinations(332, 3).exact_m, 6'044'060u);
  EXPECT_EQ(count_combinations(60, 3).cumulative, 36'050u);
  for (std::uint64_t n = 1; n < 40; ++n) EXPECT_EQ(count_combinations(n, 1).exact_m, n);
}

TEST(CountCombinations, MatchesPascalTriangle) {
  for (std::uint64_t n = 1; n <= 60; ++n) {
    std::uint64_t total = 0;
    for (std::uint64_t m = 1; m <= std::min<std::uint64_t>(n, 12); ++m) {
      total += binomial_by_pascal(n, m);
      const auto c = count_combinations(n, m);
      EXPECT_EQ(c.exact_m, binomial_by_pascal(n, m)) << n << " " << m;
      EXPECT_EQ(c.cumulative, total);
    }
  }
}

TEST(CountCombinations, EdgesAndErrors) {
  EXPECT_THROW(count_combinations(3, 4), RangeError);
  EXPECT_EQ(count_combinations(3, 0).exact_m, 1u);
  EXPECT_EQ(count_combinations(3, 0).cumulative, 0u);
  EXPECT_THROW(count_combinations(10'000, 10), RangeError);
}

TEST(Objective, RoundTrip) {
  EXPECT_EQ(parse_objective("swmse"), Objective::kSwmse);
  EXPECT_EQ(parse_objective(to_string(Objective::kMse)), Objective::kMse);
  EXPECT_THROW(parse_objective("rmse"), Error);
}

TEST(FullSearch, PerfectSingleColumn) {
  const Dataset d = Dataset::from_rows({"a", "b", "c", "e"}, {"A", "B"},
                                       {{1, 1}, {1, 0}, {0, 1}, {0, 0}}, {1.0, 1.0, 0.0, 0.0});
  const SearchResult r = full_search(d, 1);
  EXPECT_EQ(r.best, FingerprintSet{0});
  EXPECT_EQ(r.swmse, 0.0);
  EXPECT_EQ(r.mse, 0.0);
  EXPECT_EQ(r.candidates_evaluated, 2u);
}

TEST(FullSearch, ComplementTieGoesToLowerIndex) {
  const Dataset d = augment_complements(Dataset::from_rows(
      {"a", "b", "c", "e"}, {"A"}, {{1}, {1}, {0}, {0}}, {3.0, 3.0, 1.0, 1.0}));
  const SearchResult r = full_search(d, 1);
  EXPECT_EQ(r.best, FingerprintSet{0});
}

TEST(FullSearch, PrefersSmallerSetOnTies) {
  // A and A∧B define the same split when B is all ones.
  const Dataset d = Dataset::from_rows({"a", "b", "c", "e"}, {"B", "A"},
                                       {{1, 1}, {1, 1}, {1, 0}, {1, 0}}, {2.0, 2.1, 0.0, 0.1});
  const SearchResult r = full_search(d, 2);
  EXPECT_EQ(r.best, FingerprintSet{1});
}

TEST(FullSearch, RecoversPlantedPair) {
  std::mt19937_64 rng(1);
  const auto p = testing::planted_dataset(rng, 80, 6, {1, 4});
  const SearchResult r = full_search(p.data, 3);
  EXPECT_EQ(r.best, p.truth);
  EXPECT_EQ(r.candidates_evaluated, count_combinations(12, 3).cumulative);
}

TEST(FullSearch, BudgetAndRange) {
  std::mt19937_64 rng(2);
  const Dataset d = testing::random_dataset(rng, 10, 10);
  FullSearchOptions o;
  o.budget = count_combinations(10, 3).cumulative - 1;
  EXPECT_THROW(full_search(d, 3, o), BudgetError);
  o.budget = count_combinations(10, 3).cumulative;
  EXPECT_NO_THROW(full_search(d, 3, o));
  EXPECT_THROW(full_search(d, 0), RangeError);
  EXPECT_THROW(full_search(d, 11), RangeError);
}

// Independent oracle: score every subset bitmask from scratch.
TEST(FullSearch, MatchesBitmaskEnumeration) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset d = testing::random_dataset(rng, 15, 7);
    const std::size_t m = 1 + rep % 4;
    for (Objective obj : {Objective::kSwmse, Objective::kMse}) {
      double best = std::numeric_limits<double>::infinity();
      for (unsigned mask = 1; mask < (1u << 7); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > m) continue;
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < 7; ++j) {
          if (mask >> j & 1) cols.push_back(j);
        }
        const auto g = testing::product_by_rows(d, cols);
        const std::vector<double> t(d.targets().begin(), d.targets().end());
        best = std::min(best, obj == Objective::kSwmse ? testing::swmse_by_variance(t, g)
                                                       : testing::mse_by_residuals(t, g));
      }
      FullSearchOptions o;
      o.objective = obj;
      const SearchResult r = full_search(d, m, o);
      const double got = obj == Objective::kSwmse ? r.swmse : r.mse;
      EXPECT_TRUE(testing::close_rel(got, best, 1e-9)) << got << " vs " << best;
    }
  }
}

// The SWMSE optimum is the minimum QUBO energy over valid encodings.
TEST(FullSearch, SwmseOptimumEqualsMinimumValidEnergy) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset d = testing::random_dataset(rng, 12, 6);
    const std::size_t m = 2;
    const QuboModel q = build_qubo(d, m, default_penalty_weights(d));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < 6; ++a) {
      best = std::min(best, q.energy(encode(d, FingerprintSet{a}, q.layout())));
      for (std::size_t b = a + 1; b < 6; ++b) {
        best = std::min(best, q.energy(encode(d, FingerprintSet{a, b}, q.layout())));
      }
    }
    EXPECT_NEAR(full_search(d, m).swmse, best, 1e-9);
  }
}

TEST(FullSearch, WorkerCountDoesNotChangeResult) {
  std::mt19937_64 rng(5);
  const Dataset d = testing::random_dataset(rng, 30, 14);
  const SearchResult one = full_search(d, 3);
  for (std::size_t w : {2u, 4u, 0u}) {
    FullSearchOptions o;
    o.workers = w;
    const SearchResult r = full_search(d, 3, o);
    EXPECT_EQ(r.best, one.best);
    EXPECT_EQ(r.swmse, one.swmse);
    EXPECT_EQ(r.candidates_evaluated, one.candidates_evaluated);
  }
}

TEST(FullSearch, SwmseNeverAboveMseOfReturnedSet) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset d = testing::random_dataset(rng, 9, 5);
    const SearchResult r = full_search(d, 2);
    EXPECT_LE(r.swmse, r.mse + 1e-12);
  }
}

}  // namespace
}  // namespace qubofp
