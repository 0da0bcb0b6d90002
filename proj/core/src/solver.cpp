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

#include "qubofp/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "qubofp/errors.hpp"

namespace qubofp {
namespace {

// Symmetric neighbour lists in CSR form.
struct Adjacency {
  std::vector<std::size_t> start;
  std::vector<std::uint32_t> neighbour;
  std::vector<double> weight;

  explicit Adjacency(const QuboModel& q) : start(q.size() + 1, 0) {
    for (const auto& t : q.quadratic()) {
      ++start[t.i + 1];
      ++start[t.j + 1];
    }
    for (std::size_t l = 0; l < q.size(); ++l) start[l + 1] += start[l];
    neighbour.resize(start.back());
    weight.resize(start.back());
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (const auto& t : q.quadratic()) {
      neighbour[fill[t.i]] = t.j;
      weight[fill[t.i]++] = t.value;
      neighbour[fill[t.j]] = t.i;
      weight[fill[t.j]++] = t.value;
    }
  }
};

// Local fields h_l = linear_l + sum_k w_lk x_k; flipping l changes the
// energy by (1 - 2 x_l) h_l.
class FieldState {
 public:
  FieldState(const QuboModel& q, const Adjacency& adj, std::vector<std::uint8_t> bits)
      : q_(q), adj_(adj), bits_(std::move(bits)) {
    resync();
  }

  void resync() {
    field_ = q_.linear();
    for (std::size_t l = 0; l < bits_.size(); ++l) {
      if (!bits_[l]) continue;
      for (std::size_t k = adj_.start[l]; k < adj_.start[l + 1]; ++k) {
        field_[adj_.neighbour[k]] += adj_.weight[k];
      }
    }
    energy_ = q_.offset();
    for (std::size_t l = 0; l < bits_.size(); ++l) {
      if (bits_[l]) energy_ += 0.5 * (q_.linear()[l] + field_[l]);
    }
  }

  double delta(std::size_t l) const noexcept {
    return bits_[l] ? -field_[l] : field_[l];
  }

  void flip(std::size_t l) noexcept {
    energy_ += delta(l);
    const double sign = bits_[l] ? -1.0 : 1.0;
    bits_[l] ^= 1;
    for (std::size_t k = adj_.start[l]; k < adj_.start[l + 1]; ++k) {
      field_[adj_.neighbour[k]] += sign * adj_.weight[k];
    }
  }

  double energy() const noexcept { return energy_; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::vector<std::uint8_t>& mutable_bits() noexcept { return bits_; }

 private:
  const QuboModel& q_;
  const Adjacency& adj_;
  std::vector<std::uint8_t> bits_;
  std::vector<double> field_;
  double energy_ = 0.0;
};

// Applies composite fingerprint moves to a FieldState, remembering the
// flipped bits so a rejected proposal can be undone.
class CompositeMover {
 public:
  CompositeMover(const FingerprintMoves& moves, FieldState& state)
      : moves_(moves), layout_(moves.layout()), state_(state) {}

  // Proposes a toggle or a swap; returns the energy change it caused.
  double propose(std::mt19937_64& rng) {
    flipped_.clear();
    const double before = state_.energy();
    std::uniform_int_distribution<std::size_t> feature(0, layout_.n_f - 1);
    selected_.clear();
    unselected_.clear();
    for (std::size_t j = 0; j < layout_.n_f; ++j) {
      (state_.bits()[layout_.feature(j)] ? selected_ : unselected_).push_back(j);
    }
    std::bernoulli_distribution swap(0.5);
    if (swap(rng) && !selected_.empty() && !unselected_.empty()) {
      std::uniform_int_distribution<std::size_t> pick_on(0, selected_.size() - 1);
      std::uniform_int_distribution<std::size_t> pick_off(0, unselected_.size() - 1);
      const std::size_t out = selected_[pick_on(rng)];
      const std::size_t in = unselected_[pick_off(rng)];
      toggle(out);
      toggle(in);
    } else {
      const std::size_t j = feature(rng);
      toggle(j);
      const bool now_on = state_.bits()[layout_.feature(j)];
      fix_slack(now_on ? selected_.size() + 1 : selected_.size() - 1);
      return state_.energy() - before;
    }
    fix_slack(selected_.size());
    return state_.energy() - before;
  }

  void undo() {
    for (auto it = flipped_.rbegin(); it != flipped_.rend(); ++it) state_.flip(*it);
    flipped_.clear();
  }

 private:
  void flip(std::size_t l) {
    state_.flip(l);
    flipped_.push_back(static_cast<std::uint32_t>(l));
  }

  void toggle(std::size_t j) {
    const bool turning_on = !state_.bits()[layout_.feature(j)];
    flip(layout_.feature(j));
    for (const auto i : moves_.zeros(j)) {
      std::size_t hot = 0;
      std::size_t n_hot = 0;
      for (std::size_t c = 0; c <= layout_.m; ++c) {
        if (state_.bits()[layout_.count(i, c)]) {
          hot = c;
          ++n_hot;
        }
      }
      if (n_hot != 1) continue;
      if (turning_on && hot == layout_.m) continue;
      if (!turning_on && hot == 0) continue;
      const std::size_t target = turning_on ? hot + 1 : hot - 1;
      flip(layout_.count(i, hot));
      flip(layout_.count(i, target));
    }
  }

  void fix_slack(std::size_t u) {
    if (u < 1 || u > layout_.m) return;
    for (std::size_t k = 1; k <= layout_.m; ++k) {
      const bool want = k == u;
      if (static_cast<bool>(state_.bits()[layout_.slack(k)]) != want) flip(layout_.slack(k));
    }
  }

  const FingerprintMoves& moves_;
  const VariableLayout& layout_;
  FieldState& state_;
  std::vector<std::uint32_t> flipped_;
  std::vector<std::size_t> selected_;
  std::vector<std::size_t> unselected_;
};

// Consistent encoding of a random fingerprint set with 1 <= U <= M.
std::vector<std::uint8_t> random_consistent_state(const FingerprintMoves& moves,
                                                  std::mt19937_64& rng) {
  const auto& layout = moves.layout();
  std::vector<std::uint8_t> bits(layout.total(), 0);
  std::uniform_int_distribution<std::size_t> size(1, layout.m);
  const std::size_t u = size(rng);
  std::vector<std::size_t> order(layout.n_f);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> count(layout.n_s, 0);
  for (std::size_t k = 0; k < u; ++k) {
    bits[layout.feature(order[k])] = 1;
    for (const auto i : moves.zeros(order[k])) ++count[i];
  }
  for (std::size_t i = 0; i < layout.n_s; ++i) bits[layout.count(i, count[i])] = 1;
  bits[layout.slack(u)] = 1;
  return bits;
}

SolveResult anneal_once(const QuboModel& q, const Adjacency& adj,
                        const AnnealSchedule& s, std::uint64_t seed,
                        const FingerprintMoves* moves) {
  const std::size_t n = q.size();
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> init(n);
  if (moves) {
    init = random_consistent_state(*moves, rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (auto& b : init) b = coin(rng) ? 1 : 0;
  }
  if (n == 0) return {Assignment{init}, q.offset()};

  FieldState state(q, adj, std::move(init));
  std::vector<std::uint8_t> best = state.bits();
  double best_energy = state.energy();

  std::optional<CompositeMover> mover;
  if (moves) mover.emplace(*moves, state);
  const std::size_t composite = moves ? moves->layout().n_f : 0;

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ratio = s.sweeps > 1
                           ? std::pow(s.beta_end / s.beta_start,
                                      1.0 / static_cast<double>(s.sweeps - 1))
                           : 1.0;
  double beta = s.beta_start;
  for (std::size_t sweep = 0; sweep < s.sweeps; ++sweep) {
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t l = pick(rng);
      const double de = state.delta(l);
      if (de <= 0.0 || unit(rng) < std::exp(-beta * de)) state.flip(l);
    }
    for (std::size_t step = 0; step < composite; ++step) {
      const double de = mover->propose(rng);
      if (!(de <= 0.0 || unit(rng) < std::exp(-beta * de))) mover->undo();
    }
    if (composite) state.resync();
    if (state.energy() < best_energy) {
      best_energy = state.energy();
      best = state.bits();
    }
    beta *= ratio;
  }
  Assignment out{std::move(best)};
  const double e = q.energy(out);
  return {std::move(out), e};
}

SolveResult anneal_restarts(const QuboModel& q, const AnnealSchedule& s,
                            std::size_t workers, const FingerprintMoves* moves) {
  s.validate();
  if (moves && moves->layout().total() != q.size()) {
    throw ShapeError("simulated_anneal: move layout does not match the model");
  }
  const Adjacency adj(q);
  std::vector<SolveResult> results(s.restarts);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, s.restarts);
  if (workers <= 1) {
    for (std::size_t r = 0; r < s.restarts; ++r) {
      results[r] = anneal_once(q, adj, s, s.seed + r, moves);
    }
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < s.restarts; r += workers) {
          results[r] = anneal_once(q, adj, s, s.seed + r, moves);
        }
      });
    }
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].energy < results[best].energy) best = r;
  }
  return std::move(results[best]);
}

}  // namespace

void AnnealSchedule::validate() const {
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !std::isfinite(beta_end)) {
    throw RangeError("anneal schedule: need 0 < beta_start <= beta_end < inf");
  }
  if (restarts < 1) throw RangeError("anneal schedule: restarts must be >= 1");
}

AnnealSchedule default_schedule(const QuboModel& q, std::size_t sweeps,
                                std::size_t restarts, std::uint64_t seed) {
  std::vector<double> reach(q.size(), 0.0);
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < q.size(); ++l) {
    reach[l] = std::abs(q.linear()[l]);
    if (q.linear()[l] != 0.0) smallest = std::min(smallest, std::abs(q.linear()[l]));
  }
  for (const auto& t : q.quadratic()) {
    reach[t.i] += std::abs(t.value);
    reach[t.j] += std::abs(t.value);
    smallest = std::min(smallest, std::abs(t.value));
  }
  const double hottest = reach.empty() ? 0.0 : *std::max_element(reach.begin(), reach.end());

  double cold_step = smallest;
  const auto& layout = q.layout();
  if (layout.n_s > 0 && q.weights().lambda1 > 0.0) {
    cold_step = q.weights().lambda1 / static_cast<double>(layout.n_s);
  }

  AnnealSchedule s;
  s.sweeps = sweeps;
  s.restarts = restarts;
  s.seed = seed;
  if (!(hottest > 0.0) || !std::isfinite(cold_step)) {
    s.beta_start = s.beta_end = 1.0;
    return s;
  }
  s.beta_start = std::log(2.0) / hottest;
  s.beta_end = std::max(s.beta_start, std::log(1e6) / cold_step);
  return s;
}

FingerprintMoves::FingerprintMoves(const Dataset& d, const VariableLayout& layout)
    : layout_(layout), start_(layout.n_f + 1, 0) {
  if (d.n_fingerprints() != layout.n_f || d.n_samples() != layout.n_s || layout.m < 1) {
    throw ShapeError("fingerprint moves: layout does not describe the dataset");
  }
  for (std::size_t j = 0; j < layout.n_f; ++j) {
    const auto col = d.column(j);
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col[i] == 0) zeros_.push_back(static_cast<std::uint32_t>(i));
    }
    start_[j + 1] = zeros_.size();
  }
}

AnnealSchedule fingerprint_schedule(const QuboModel& q, const Dataset& d,
                                    std::size_t sweeps, std::size_t restarts,
                                    std::uint64_t seed) {
  AnnealSchedule s = default_schedule(q, sweeps, restarts, seed);
  const auto t = d.targets();
  if (t.empty()) return s;
  const double n = static_cast<double>(t.size());
  const double mean = std::accumulate(t.begin(), t.end(), 0.0) / n;
  double var = 0.0;
  for (double v : t) var += (v - mean) * (v - mean);
  var = std::max(var / n, 1e-12);
  s.beta_start = std::min(std::log(2.0) / var, s.beta_end);
  return s;
}

SolveResult simulated_anneal(const QuboModel& q, const AnnealSchedule& s,
                             std::size_t workers) {
  return anneal_restarts(q, s, workers, nullptr);
}

SolveResult simulated_anneal(const QuboModel& q, const AnnealSchedule& s,
                             const FingerprintMoves& moves, std::size_t workers) {
  return anneal_restarts(q, s, workers, &moves);
}

Assignment refine_local(const QuboModel& q, Assignment a) {
  if (a.size() != q.size()) {
    throw ShapeError("refine_local: assignment has " + std::to_string(a.size()) +
                     " bits, model has " + std::to_string(q.size()) + " variables");
  }
  const Adjacency adj(q);
  FieldState state(q, adj, std::move(a.bits));
  while (true) {
    std::size_t arg = q.size();
    double best = 0.0;
    for (std::size_t l = 0; l < q.size(); ++l) {
      const double de = state.delta(l);
      if (de < best) {
        best = de;
        arg = l;
      }
    }
    if (arg == q.size()) break;
    state.flip(arg);
  }
  return Assignment{state.bits()};
}

SolveResult exhaustive_solve(const QuboModel& q) {
  const std::size_t n = q.size();
  if (n > kMaxExhaustiveVariables) {
    throw TooLargeError("exhaustive_solve: " + std::to_string(n) +
                        " variables exceeds the limit of " +
                        std::to_string(kMaxExhaustiveVariables));
  }
  const Adjacency adj(q);
  FieldState state(q, adj, std::vector<std::uint8_t>(n, 0));

  double scale = std::abs(q.offset());
  for (double v : q.linear()) scale += std::abs(v);
  for (const auto& t : q.quadratic()) scale += std::abs(t.value);
  const double tie = 1e-12 * std::max(scale, 1.0);

  Assignment best{state.bits()};
  double best_energy = q.offset();
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    // Gray code: step k flips bit ctz(k); bit index 0 of the counter maps to
    // the last vector position.
    const auto pos = static_cast<std::size_t>(std::countr_zero(k));
    state.flip(n - 1 - pos);
    if ((k & 0xffff) == 0) state.resync();
    const double e = state.energy();
    if (e > best_energy + tie) continue;
    Assignment cand{state.bits()};
    const double exact = q.energy(cand);
    if (exact < best_energy - tie ||
        (exact <= best_energy + tie && cand.bits < best.bits)) {
      best = std::move(cand);
      best_energy = exact;
    }
  }
  return {std::move(best), best_energy};
}

}  // namespace qubofp
