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

#include "qubofp/search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

#include "qubofp/errors.hpp"

namespace qubofp {

std::string_view to_string(Objective o) noexcept {
  return o == Objective::kSwmse ? "swmse" : "mse";
}

Objective parse_objective(std::string_view s) {
  if (s == "swmse") return Objective::kSwmse;
  if (s == "mse") return Objective::kMse;
  throw RangeError("unknown objective '" + std::string(s) + "' (expected swmse or mse)");
}

CombinationCount count_combinations(std::uint64_t n_f, std::uint64_t m) {
  if (m > n_f) {
    throw RangeError("count_combinations: m=" + std::to_string(m) + " exceeds n_f=" +
                     std::to_string(n_f));
  }
  CombinationCount out;
  // C(n, u) = C(n, u-1) * (n - u + 1) / u. Dividing out g = gcd(C, u) first
  // keeps every step exact: u / g then divides n - u + 1.
  std::uint64_t c = 1;
  std::uint64_t cumulative = 0;
  for (std::uint64_t u = 1; u <= m; ++u) {
    const std::uint64_t g = std::gcd(c, u);
    const std::uint64_t factor = (n_f - u + 1) / (u / g);
    if (__builtin_mul_overflow(c / g, factor, &c) ||
        __builtin_add_overflow(cumulative, c, &cumulative)) {
      throw RangeError("count_combinations: C(" + std::to_string(n_f) + ", " +
                       std::to_string(u) + ") overflows 64 bits");
    }
  }
  out.exact_m = c;
  out.cumulative = cumulative;
  return out;
}

namespace {

struct Candidate {
  double score = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> indices;

  bool better_than(const Candidate& o) const {
    if (score != o.score) return score < o.score;
    if (indices.size() != o.indices.size()) return indices.size() < o.indices.size();
    return indices < o.indices;
  }
};

// Depth-first enumeration of every subset of size <= m whose smallest index
// is `first`; each candidate is scored from scratch through the stump API.
void enumerate_from(const Dataset& d, std::size_t m, Objective objective,
                    std::size_t first, Candidate& best, std::uint64_t& evaluated) {
  std::vector<std::size_t> stack{first};
  const std::size_t n_f = d.n_fingerprints();
  while (!stack.empty()) {
    const FingerprintSet f(stack);
    const auto s = split_stats(d, f);
    const double score = objective == Objective::kSwmse ? swmse(s, d.n_samples())
                                                        : mse(s, d.n_samples());
    ++evaluated;
    Candidate cand{score, stack};
    if (cand.better_than(best)) best = std::move(cand);

    // Next subset in lexicographic DFS order.
    if (stack.size() < m && stack.back() + 1 < n_f) {
      stack.push_back(stack.back() + 1);
      continue;
    }
    while (!stack.empty()) {
      if (stack.size() > 1 && stack.back() + 1 < n_f) {
        ++stack.back();
        break;
      }
      stack.pop_back();
    }
  }
}

}  // namespace

SearchResult full_search(const Dataset& d, std::size_t m,
                         const FullSearchOptions& options) {
  const std::size_t n_f = d.n_fingerprints();
  if (m < 1 || m > n_f) {
    throw RangeError("full_search: M=" + std::to_string(m) + " outside [1, " +
                     std::to_string(n_f) + "]");
  }
  const auto counts = count_combinations(n_f, m);
  if (counts.cumulative > options.budget) {
    throw BudgetError("full_search: " + std::to_string(counts.cumulative) +
                      " candidates exceed the budget of " +
                      std::to_string(options.budget));
  }
  const auto t0 = std::chrono::steady_clock::now();

  std::size_t workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_f);
  std::vector<Candidate> best(workers);
  std::vector<std::uint64_t> evaluated(workers, 0);
  auto run = [&](std::size_t w) {
    for (std::size_t first = w; first < n_f; first += workers) {
      enumerate_from(d, m, options.objective, first, best[w], evaluated[w]);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  Candidate winner;
  std::uint64_t total = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    total += evaluated[w];
    if (!best[w].indices.empty() && (winner.indices.empty() || best[w].better_than(winner))) {
      winner = best[w];
    }
  }

  SearchResult out;
  out.best = FingerprintSet(winner.indices);
  const auto s = split_stats(d, out.best);
  out.swmse = swmse(s, d.n_samples());
  out.mse = mse(s, d.n_samples());
  out.candidates_evaluated = total;
  out.wall_time = std::chrono::steady_clock::now() - t0;
  return out;
}

}  // namespace qubofp
