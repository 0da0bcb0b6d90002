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
#include <iosfwd>
#include <optional>
#include <vector>

#include "qubofp/dataset.hpp"
#include "qubofp/stump.hpp"

namespace qubofp {

/// Index scheme of the QUBO variables.
///
///   feature bits  theta_F[j]    j in [0, n_f)
///   count bits    theta_X[i][c] i in [0, n_s), c in [0, m]; theta_X[i][0]
///                               is the split value of sample i
///   slack bits    theta_U[u]    u in [1, m]; one-hot encoding of U
struct VariableLayout {
  std::size_t n_f = 0;
  std::size_t n_s = 0;
  std::size_t m = 0;

  std::size_t total() const noexcept { return n_f + n_s * (m + 1) + m; }
  std::size_t feature(std::size_t j) const noexcept { return j; }
  std::size_t count(std::size_t i, std::size_t c) const noexcept {
    return n_f + i * (m + 1) + c;
  }
  std::size_t slack(std::size_t u) const noexcept {
    return n_f + n_s * (m + 1) + (u - 1);
  }

  friend bool operator==(const VariableLayout&, const VariableLayout&) = default;
};

/// Multipliers of the three constraint Hamiltonians.
struct PenaltyWeights {
  double lambda1 = 1.0;  // theta_F / theta_X consistency, per sample
  double lambda2 = 1.0;  // theta_X one-hot, per sample
  double lambda3 = 1.0;  // 1 <= U <= M through the slack bits

  friend bool operator==(const PenaltyWeights&, const PenaltyWeights&) = default;
};

/// Default multipliers: scale * max(range(t)^2, 1e-12) for every constraint.
/// A single violated sample then costs at least as much as the largest loss
/// change a single bit flip can buy.
PenaltyWeights default_penalty_weights(const Dataset& d, double scale = 1.0);

struct QuadraticTerm {
  std::uint32_t i = 0;
  std::uint32_t j = 0;  // i < j
  double value = 0.0;

  friend bool operator==(const QuadraticTerm&, const QuadraticTerm&) = default;
};

/// Binary assignment of every QUBO variable.
struct Assignment {
  std::vector<std::uint8_t> bits;

  std::size_t size() const noexcept { return bits.size(); }
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Upper-triangular QUBO in minimization form:
///   E(x) = offset + sum_l linear[l] x_l + sum_{l<m} q_lm x_l x_m.
/// Quadratic terms are stored sorted by (i, j) with no duplicates and no
/// zero values.
class QuboModel {
 public:
  QuboModel() = default;
  QuboModel(VariableLayout layout, PenaltyWeights weights, double offset,
            std::vector<double> linear, std::vector<QuadraticTerm> quadratic);

  /// Plain model without a fingerprint layout (used for generic solver
  /// tests). Terms may be unsorted and repeated; they are canonicalized.
  static QuboModel from_terms(std::size_t n_vars, double offset,
                              std::vector<double> linear,
                              std::vector<QuadraticTerm> quadratic);

  std::size_t size() const noexcept { return linear_.size(); }
  const VariableLayout& layout() const noexcept { return layout_; }
  const PenaltyWeights& weights() const noexcept { return weights_; }
  double offset() const noexcept { return offset_; }
  const std::vector<double>& linear() const noexcept { return linear_; }
  const std::vector<QuadraticTerm>& quadratic() const noexcept { return quadratic_; }

  /// Coefficient of x_i x_j (order of i, j irrelevant); 0 when absent.
  double quadratic_at(std::size_t i, std::size_t j) const;

  /// Throws ShapeError if the assignment length differs from size().
  double energy(const Assignment& a) const;

 private:
  VariableLayout layout_;
  PenaltyWeights weights_;
  double offset_ = 0.0;
  std::vector<double> linear_;
  std::vector<QuadraticTerm> quadratic_;
};

/// Compiles the split search on `d` with at most `m` producted fingerprints
/// into a QUBO:
///
///   E = (1/N^2) sum_b (N_b * sum_{S_b} t^2 - (sum_{S_b} t)^2)
///     + (lambda1/N) sum_i (sum_j (1 - X_ij) F_j - sum_c c X_ic)^2
///     + (lambda2/N) sum_i (sum_c X_ic - 1)^2
///     + lambda3 ((sum_j F_j - sum_u u U_u)^2 + (sum_u U_u - 1)^2)
///
/// where S_1 = {i : X_i0 = 1}. The first line is the square-weighted MSE of
/// the split, so on a constraint-satisfying assignment E equals swmse() of
/// the decoded fingerprint. Throws RangeError unless 1 <= m <= N_F and
/// DegenerateError when N_S < 2.
QuboModel build_qubo(const Dataset& d, std::size_t m, const PenaltyWeights& w);

/// Selected columns {j : theta_F[j] = 1}; all other bits are ignored.
/// Throws EmptySelectionError when no feature bit is set.
FingerprintSet decode(const Assignment& a, const VariableLayout& layout);

/// Constraint report for an assignment.
struct DecodedSolution {
  FingerprintSet fingerprint;
  std::size_t u = 0;
  /// Per-sample residuals of the consistency and one-hot constraints.
  std::vector<long> c1_residuals;
  std::vector<long> c2_residuals;
  std::size_t c1_violations = 0;  // samples with a non-zero c1 residual
  std::size_t c2_violations = 0;
  bool c3_violated = false;       // slack bits not one-hot or not equal to U
  std::optional<double> swmse;    // empty when no fingerprint is selected
  bool valid = false;
};

DecodedSolution check_constraints(const Dataset& d, const Assignment& a,
                                  const VariableLayout& layout);

/// Assignment that satisfies every constraint for fingerprint `f`: the count
/// bits encode the true unsatisfied counts and the slack bit encodes U.
/// Throws RangeError unless 1 <= U <= M.
Assignment encode(const Dataset& d, const FingerprintSet& f,
                  const VariableLayout& layout);

/// Text export: `offset <v>`, then `l <i> <v>` per non-zero linear term,
/// then `q <i> <j> <v>` per quadratic term (i < j).
void write_qubo(const QuboModel& q, std::ostream& out);
QuboModel read_qubo(std::istream& in);

}  // namespace qubofp
