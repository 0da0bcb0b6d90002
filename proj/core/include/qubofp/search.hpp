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

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "qubofp/dataset.hpp"
#include "qubofp/stump.hpp"

namespace qubofp {

enum class Objective { kSwmse, kMse };

std::string_view to_string(Objective o) noexcept;
/// Accepts "swmse" or "mse"; throws RangeError otherwise.
Objective parse_objective(std::string_view s);

struct CombinationCount {
  std::uint64_t exact_m = 0;     // C(n_f, m)
  std::uint64_t cumulative = 0;  // sum_{u=1..m} C(n_f, u)
};

/// Exact binomial counts. Throws RangeError when m > n_f or a count does
/// not fit in 64 bits.
CombinationCount count_combinations(std::uint64_t n_f, std::uint64_t m);

struct SearchResult {
  FingerprintSet best;
  double swmse = 0.0;
  double mse = 0.0;
  std::uint64_t candidates_evaluated = 0;
  std::chrono::nanoseconds wall_time{0};
};

struct FullSearchOptions {
  Objective objective = Objective::kSwmse;
  std::uint64_t budget = 100'000'000;
  std::size_t workers = 1;  // 0 = hardware concurrency
};

/// Scores every fingerprint set of size 1..m and returns the minimizer of the
/// chosen objective. Ties go to the smaller set, then to the
/// lexicographically smallest index list. Throws RangeError unless
/// 1 <= m <= N_F and BudgetError when the candidate count exceeds the budget.
SearchResult full_search(const Dataset& d, std::size_t m,
                         const FullSearchOptions& options = {});

}  // namespace qubofp
