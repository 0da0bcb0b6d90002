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

#include "qubofp/stump.hpp"

#include <algorithm>
#include <limits>

#include "qubofp/errors.hpp"

namespace qubofp {

FingerprintSet::FingerprintSet(std::vector<std::size_t> indices)
    : selected_(std::move(indices)) {
  std::sort(selected_.begin(), selected_.end());
  if (std::adjacent_find(selected_.begin(), selected_.end()) != selected_.end()) {
    throw RangeError("fingerprint set: duplicate column index");
  }
}

void FingerprintSet::check_bounds(std::size_t n_fingerprints) const {
  if (!selected_.empty() && selected_.back() >= n_fingerprints) {
    throw RangeError("fingerprint set: column index " +
                     std::to_string(selected_.back()) + " out of range (N_F=" +
                     std::to_string(n_fingerprints) + ")");
  }
}

FingerprintSet FingerprintSet::with(std::size_t j) const {
  FingerprintSet out = *this;
  const auto it = std::lower_bound(out.selected_.begin(), out.selected_.end(), j);
  if (it == out.selected_.end() || *it != j) out.selected_.insert(it, j);
  return out;
}

std::vector<std::uint8_t> interaction_values(const Dataset& d,
                                             const FingerprintSet& f) {
  if (f.empty()) {
    throw EmptySelectionError("interaction fingerprint has no producted fingerprint");
  }
  f.check_bounds(d.n_fingerprints());
  const auto first = d.column(f.selected().front());
  std::vector<std::uint8_t> g(first.begin(), first.end());
  for (std::size_t k = 1; k < f.u(); ++k) {
    const auto col = d.column(f.selected()[k]);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] &= col[i];
  }
  return g;
}

SplitStats split_stats(std::span<const double> targets,
                       std::span<const std::uint8_t> g) {
  if (targets.size() != g.size()) {
    throw ShapeError("split_stats: " + std::to_string(targets.size()) +
                     " targets but " + std::to_string(g.size()) + " split values");
  }
  SplitStats s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = targets[i];
    if (g[i]) {
      ++s.n1;
      s.sum1 += t;
      s.sumsq1 += t * t;
    } else {
      ++s.n0;
      s.sum0 += t;
      s.sumsq0 += t * t;
    }
  }
  return s;
}

SplitStats split_stats(const Dataset& d, const FingerprintSet& f) {
  return split_stats(d.targets(), interaction_values(d, f));
}

namespace {

void check_total(const SplitStats& s, std::size_t n_total, const char* what) {
  if (n_total == 0) {
    throw DegenerateError(std::string(what) + ": no samples");
  }
  if (s.n_total() != n_total) {
    throw ShapeError(std::string(what) + ": split covers " +
                     std::to_string(s.n_total()) + " samples, expected " +
                     std::to_string(n_total));
  }
}

// n_b * sumsq_b - sum_b^2, i.e. n_b^2 * Var_b; clamped at 0 against rounding.
double scaled_variance(std::size_t n, double sum, double sumsq) {
  if (n == 0) return 0.0;
  return std::max(0.0, static_cast<double>(n) * sumsq - sum * sum);
}

}  // namespace

double mse(const SplitStats& s, std::size_t n_total) {
  check_total(s, n_total, "mse");
  const double n = static_cast<double>(n_total);
  double out = 0.0;
  if (s.n1 > 0) out += scaled_variance(s.n1, s.sum1, s.sumsq1) / static_cast<double>(s.n1);
  if (s.n0 > 0) out += scaled_variance(s.n0, s.sum0, s.sumsq0) / static_cast<double>(s.n0);
  return out / n;
}

double swmse(const SplitStats& s, std::size_t n_total) {
  check_total(s, n_total, "swmse");
  const double n = static_cast<double>(n_total);
  return (scaled_variance(s.n1, s.sum1, s.sumsq1) +
          scaled_variance(s.n0, s.sum0, s.sumsq0)) /
         (n * n);
}

StumpModel fit_stump(const Dataset& d, const FingerprintSet& f) {
  const auto s = split_stats(d, f);
  StumpModel m;
  m.fingerprint = f;
  m.pred1 = s.n1 ? s.sum1 / static_cast<double>(s.n1) : 0.0;
  m.pred0 = s.n0 ? s.sum0 / static_cast<double>(s.n0) : 0.0;
  return m;
}

BaselineResult best_single_baseline(const Dataset& d) {
  if (d.n_fingerprints() == 0) {
    throw RangeError("best_single_baseline: dataset has no fingerprint columns");
  }
  if (d.n_samples() < 2) {
    throw DegenerateError(
        "best_single_baseline: every column is constant on fewer than two samples");
  }
  BaselineResult best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < d.n_fingerprints(); ++j) {
    const double e = mse(split_stats(d.targets(), d.column(j)), d.n_samples());
    if (e < best.mse) best = {j, e};
  }
  return best;
}

std::string render_fingerprint(const Dataset& d, const FingerprintSet& f) {
  f.check_bounds(d.n_fingerprints());
  std::string out;
  for (std::size_t k = 0; k < f.u(); ++k) {
    if (k) out += "∧";
    const std::string& name = d.feature_names()[f.selected()[k]];
    if (name.starts_with(kComplementPrefix)) {
      out += "¬";
      out += name.substr(kComplementPrefix.size());
    } else {
      out += name;
    }
  }
  return out;
}

}  // namespace qubofp
