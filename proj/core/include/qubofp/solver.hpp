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

#include <span>
#include <vector>

#include "qubofp/dataset.hpp"
#include "qubofp/qubo.hpp"

namespace qubofp {

/// Metropolis annealing schedule. The inverse temperature moves
/// geometrically from beta_start to beta_end over `sweeps` sweeps; a sweep is
/// size() single-bit flip proposals at uniformly random positions.
struct AnnealSchedule {
  std::size_t sweeps = 1000;
  double beta_start = 1.0;
  double beta_end = 10.0;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;

  /// Throws RangeError unless 0 < beta_start <= beta_end and restarts >= 1.
  void validate() const;
};

/// Schedule derived from the model's coefficients.
///
/// beta_start lets the hottest proposal (the largest possible |delta E| of
/// any bit) through with probability 1/2. beta_end makes a proposal that
/// breaks one consistency constraint of one sample (energy lambda1 / N_S) an
/// event of probability 1e-6; models without a fingerprint layout use the
/// smallest non-zero coefficient magnitude instead.
AnnealSchedule default_schedule(const QuboModel& q, std::size_t sweeps = 1000,
                                std::size_t restarts = 1, std::uint64_t seed = 0);

/// Schedule for a model built by build_qubo(d, ...): beta_start = ln 2 /
/// Var(t), since no split can lower the loss by more than the target
/// variance, and beta_end as in default_schedule.
AnnealSchedule fingerprint_schedule(const QuboModel& q, const Dataset& d,
                                    std::size_t sweeps = 1000, std::size_t restarts = 1,
                                    std::uint64_t seed = 0);

struct SolveResult {
  Assignment assignment;
  double energy = 0.0;
};

/// Composite moves for a model produced by build_qubo.
///
/// Toggling feature bit j changes the unsatisfied count of every sample
/// with X_ij = 0, so on its own it always breaks consistency. A composite
/// move toggles j (or swaps a selected and an unselected feature) and shifts
/// each affected sample's one-hot count bit by one along with the slack bit,
/// which carries a consistent assignment to another consistent assignment.
class FingerprintMoves {
 public:
  /// Throws ShapeError if `layout` does not describe `d`.
  FingerprintMoves(const Dataset& d, const VariableLayout& layout);

  const VariableLayout& layout() const noexcept { return layout_; }
  /// Samples i with X_ij = 0.
  std::span<const std::uint32_t> zeros(std::size_t j) const noexcept {
    return {zeros_.data() + start_[j], start_[j + 1] - start_[j]};
  }

 private:
  VariableLayout layout_;
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> zeros_;
};

/// Simulated annealing with independent restarts. Restart r draws its
/// initial state and proposals from a generator seeded with seed + r and
/// keeps the lowest-energy state it visits (checked after every sweep). The
/// best restart wins, lower restart index on equal energy. The result depends
/// only on (q, s); `workers` only sets how many restarts run concurrently
/// (0 = hardware concurrency).
SolveResult simulated_anneal(const QuboModel& q, const AnnealSchedule& s,
                             std::size_t workers = 1);

/// As above, with composite fingerprint moves. Each restart starts from the
/// consistent encoding of a random fingerprint set with 1 <= U <= M, and
/// every sweep adds layout.n_f composite proposals (feature toggles and
/// swaps, equally likely) to the size() single-bit proposals. Every proposal
/// is accepted or rejected on its exact energy change.
SolveResult simulated_anneal(const QuboModel& q, const AnnealSchedule& s,
                             const FingerprintMoves& moves, std::size_t workers = 1);

/// Steepest-descent single-flip refinement: repeatedly flips the bit with the
/// largest energy decrease (lowest index on ties) until none decreases it.
Assignment refine_local(const QuboModel& q, Assignment a);

/// Largest model exhaustive_solve accepts.
inline constexpr std::size_t kMaxExhaustiveVariables = 24;

/// Global minimum by enumerating all 2^n assignments; ties go to the
/// lexicographically smallest bit vector (bits[0] most significant). Throws
/// TooLargeError above kMaxExhaustiveVariables.
SolveResult exhaustive_solve(const QuboModel& q);

}  // namespace qubofp
