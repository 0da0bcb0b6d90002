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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qubofp/dataset.hpp"

namespace qubofp {

/// The producted fingerprints of an interaction fingerprint: a sorted,
/// duplicate-free set of column indices. U is its size.
class FingerprintSet {
 public:
  FingerprintSet() = default;
  /// Sorts `indices`; throws RangeError on a repeated index.
  explicit FingerprintSet(std::vector<std::size_t> indices);
  FingerprintSet(std::initializer_list<std::size_t> indices)
      : FingerprintSet(std::vector<std::size_t>(indices)) {}

  const std::vector<std::size_t>& selected() const noexcept { return selected_; }
  std::size_t u() const noexcept { return selected_.size(); }
  bool empty() const noexcept { return selected_.empty(); }

  /// Throws RangeError if any index is >= n_fingerprints.
  void check_bounds(std::size_t n_fingerprints) const;

  /// Copy with `j` added (no-op if already present).
  FingerprintSet with(std::size_t j) const;

  friend bool operator==(const FingerprintSet&, const FingerprintSet&) = default;
  friend auto operator<=>(const FingerprintSet&, const FingerprintSet&) = default;

 private:
  std::vector<std::size_t> selected_;
};

/// Group counts and first/second target moments of a binary split.
/// Group 1 holds the samples whose interaction value is 1.
struct SplitStats {
  std::size_t n1 = 0;
  std::size_t n0 = 0;
  double sum1 = 0.0;
  double sum0 = 0.0;
  double sumsq1 = 0.0;
  double sumsq0 = 0.0;

  std::size_t n_total() const noexcept { return n1 + n0; }
};

/// Depth-1 regression split on an interaction fingerprint.
struct StumpModel {
  FingerprintSet fingerprint;
  double pred1 = 0.0;  // mean target where the interaction holds
  double pred0 = 0.0;  // mean target elsewhere

  double predict(std::uint8_t g) const noexcept { return g ? pred1 : pred0; }
};

/// g_i = product of X_{i,j} over the selected columns. Throws
/// EmptySelectionError for an empty set, RangeError for bad indices.
std::vector<std::uint8_t> interaction_values(const Dataset& d,
                                             const FingerprintSet& f);

/// Throws ShapeError when lengths differ.
SplitStats split_stats(std::span<const double> targets,
                       std::span<const std::uint8_t> g);

/// Stump MSE as the proportion-weighted sum of group variances. Empty groups
/// contribute 0. Throws DegenerateError for n_total == 0 and ShapeError when
/// the stats do not cover n_total samples.
double mse(const SplitStats& s, std::size_t n_total);

/// Square-weighted MSE: group variances weighted by the squared group
/// proportion, i.e. (1/N^2) * sum_b (n_b * sumsq_b - sum_b^2).
double swmse(const SplitStats& s, std::size_t n_total);

/// Group means for the split induced by `f`; an empty group predicts 0.
StumpModel fit_stump(const Dataset& d, const FingerprintSet& f);

/// Convenience: split statistics of `f` on `d`.
SplitStats split_stats(const Dataset& d, const FingerprintSet& f);

struct BaselineResult {
  std::size_t column = 0;
  double mse = 0.0;
};

/// Single column with the lowest stump MSE; ties go to the lowest index.
/// Throws RangeError if the dataset has no columns and DegenerateError when
/// every column is constant on fewer than two samples.
BaselineResult best_single_baseline(const Dataset& d);

/// Human-readable conjunction, e.g. "OH∧RING∧¬N". Complement columns
/// (NOT_ prefix) render with "¬".
std::string render_fingerprint(const Dataset& d, const FingerprintSet& f);

}  // namespace qubofp
