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

#include "qubofp/qubo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "qubofp/errors.hpp"

namespace qubofp {
namespace {

// Affine form c + sum_k coef_k x_{var_k} with distinct variables.
struct LinearForm {
  double constant = 0.0;
  std::vector<std::pair<std::uint32_t, double>> terms;

  void add(std::size_t var, double coef) {
    if (coef != 0.0) terms.emplace_back(static_cast<std::uint32_t>(var), coef);
  }
};

// Accumulates a binary polynomial of degree <= 2. x^2 is folded into x.
class PolynomialAccumulator {
 public:
  explicit PolynomialAccumulator(std::size_t n) : linear_(n, 0.0) {}

  void add_constant(double v) { offset_ += v; }
  void add_linear(std::size_t i, double v) { linear_[i] += v; }
  void add_quadratic(std::size_t i, std::size_t j, double v) {
    if (i == j) {
      linear_[i] += v;
      return;
    }
    if (i > j) std::swap(i, j);
    quadratic_[(static_cast<std::uint64_t>(i) << 32) | j] += v;
  }

  /// scale * form^2
  void add_square(const LinearForm& f, double scale) {
    add_constant(scale * f.constant * f.constant);
    for (std::size_t a = 0; a < f.terms.size(); ++a) {
      const auto [va, ca] = f.terms[a];
      add_linear(va, scale * (2.0 * f.constant * ca + ca * ca));
      for (std::size_t b = a + 1; b < f.terms.size(); ++b) {
        const auto [vb, cb] = f.terms[b];
        add_quadratic(va, vb, scale * 2.0 * ca * cb);
      }
    }
  }

  QuboModel finish(VariableLayout layout, PenaltyWeights weights) && {
    std::vector<QuadraticTerm> terms;
    terms.reserve(quadratic_.size());
    for (const auto& [key, v] : quadratic_) {
      if (v == 0.0) continue;
      terms.push_back({static_cast<std::uint32_t>(key >> 32),
                       static_cast<std::uint32_t>(key & 0xffffffffu), v});
    }
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
      return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    return QuboModel(layout, weights, offset_, std::move(linear_), std::move(terms));
  }

 private:
  double offset_ = 0.0;
  std::vector<double> linear_;
  std::unordered_map<std::uint64_t, double> quadratic_;
};

std::vector<QuadraticTerm> canonicalize(std::vector<QuadraticTerm> terms,
                                        std::vector<double>& linear) {
  std::vector<QuadraticTerm> out;
  for (auto t : terms) {
    if (t.i == t.j) {
      linear.at(t.i) += t.value;
      continue;
    }
    if (t.i > t.j) std::swap(t.i, t.j);
    out.push_back(t);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  std::vector<QuadraticTerm> merged;
  for (const auto& t : out) {
    if (!merged.empty() && merged.back().i == t.i && merged.back().j == t.j) {
      merged.back().value += t.value;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const QuadraticTerm& t) { return t.value == 0.0; });
  return merged;
}

}  // namespace

PenaltyWeights default_penalty_weights(const Dataset& d, double scale) {
  if (scale < 0.0 || !std::isfinite(scale)) {
    throw RangeError("penalty scale must be a finite non-negative number");
  }
  const auto t = d.targets();
  double range_sq = 0.0;
  if (!t.empty()) {
    const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    range_sq = (*hi - *lo) * (*hi - *lo);
  }
  const double lambda = scale * std::max(range_sq, 1e-12);
  return {lambda, lambda, lambda};
}

QuboModel::QuboModel(VariableLayout layout, PenaltyWeights weights, double offset,
                     std::vector<double> linear, std::vector<QuadraticTerm> quadratic)
    : layout_(layout),
      weights_(weights),
      offset_(offset),
      linear_(std::move(linear)),
      quadratic_(std::move(quadratic)) {
  for (std::size_t k = 0; k < quadratic_.size(); ++k) {
    const auto& t = quadratic_[k];
    if (t.i >= t.j || t.j >= linear_.size()) {
      throw ShapeError("qubo: quadratic term (" + std::to_string(t.i) + ", " +
                       std::to_string(t.j) + ") is not upper-triangular in range");
    }
    if (k > 0 && std::tie(quadratic_[k - 1].i, quadratic_[k - 1].j) >= std::tie(t.i, t.j)) {
      throw ShapeError("qubo: quadratic terms are not sorted and unique");
    }
  }
}

QuboModel QuboModel::from_terms(std::size_t n_vars, double offset,
                                std::vector<double> linear,
                                std::vector<QuadraticTerm> quadratic) {
  if (linear.size() != n_vars) {
    throw ShapeError("qubo: linear vector has " + std::to_string(linear.size()) +
                     " entries, expected " + std::to_string(n_vars));
  }
  auto terms = canonicalize(std::move(quadratic), linear);
  return QuboModel(VariableLayout{}, PenaltyWeights{}, offset, std::move(linear),
                   std::move(terms));
}

double QuboModel::quadratic_at(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  const auto it = std::lower_bound(
      quadratic_.begin(), quadratic_.end(), std::pair{i, j},
      [](const QuadraticTerm& t, const std::pair<std::size_t, std::size_t>& key) {
        return std::pair<std::size_t, std::size_t>{t.i, t.j} < key;
      });
  if (it != quadratic_.end() && it->i == i && it->j == j) return it->value;
  return 0.0;
}

double QuboModel::energy(const Assignment& a) const {
  if (a.size() != size()) {
    throw ShapeError("energy: assignment has " + std::to_string(a.size()) +
                     " bits, model has " + std::to_string(size()) + " variables");
  }
  double e = offset_;
  for (std::size_t l = 0; l < linear_.size(); ++l) {
    if (a.bits[l]) e += linear_[l];
  }
  for (const auto& t : quadratic_) {
    if (a.bits[t.i] && a.bits[t.j]) e += t.value;
  }
  return e;
}

QuboModel build_qubo(const Dataset& d, std::size_t m, const PenaltyWeights& w) {
  const std::size_t n_f = d.n_fingerprints();
  const std::size_t n_s = d.n_samples();
  if (m < 1 || m > n_f) {
    throw RangeError("build_qubo: M=" + std::to_string(m) + " outside [1, " +
                     std::to_string(n_f) + "]");
  }
  if (n_s < 2) throw DegenerateError("build_qubo: need at least two samples");
  if (!(w.lambda1 >= 0.0 && w.lambda2 >= 0.0 && w.lambda3 >= 0.0)) {
    throw RangeError("build_qubo: penalty weights must be non-negative");
  }
  const VariableLayout layout{n_f, n_s, m};
  if (layout.total() > std::numeric_limits<std::uint32_t>::max()) {
    throw RangeError("build_qubo: too many variables");
  }
  PolynomialAccumulator acc(layout.total());
  const double n = static_cast<double>(n_s);
  const auto t = d.targets();

  // Loss. With x_i = theta_X[i][0] and d_ik = (t_i - t_k)^2,
  //   N_1 * sum_{S_1} t^2 - (sum_{S_1} t)^2 = sum_{i<k} d_ik x_i x_k
  // and likewise for S_0 with x replaced by 1 - x, so the loss is
  //   (1/N^2) sum_{i<k} d_ik (1 - x_i - x_k + 2 x_i x_k).
  const double loss_scale = 1.0 / (n * n);
  for (std::size_t i = 0; i < n_s; ++i) {
    for (std::size_t k = i + 1; k < n_s; ++k) {
      const double dik = (t[i] - t[k]) * (t[i] - t[k]);
      if (dik == 0.0) continue;
      const double c = loss_scale * dik;
      acc.add_constant(c);
      acc.add_linear(layout.count(i, 0), -c);
      acc.add_linear(layout.count(k, 0), -c);
      acc.add_quadratic(layout.count(i, 0), layout.count(k, 0), 2.0 * c);
    }
  }

  // Consistency: unsatisfied count of sample i equals sum_c c X_ic.
  if (w.lambda1 != 0.0) {
    for (std::size_t i = 0; i < n_s; ++i) {
      LinearForm form;
      for (std::size_t j = 0; j < n_f; ++j) {
        if (d.at(i, j) == 0) form.add(layout.feature(j), 1.0);
      }
      for (std::size_t c = 1; c <= m; ++c) {
        form.add(layout.count(i, c), -static_cast<double>(c));
      }
      acc.add_square(form, w.lambda1 / n);
    }
  }

  // One-hot count bits.
  if (w.lambda2 != 0.0) {
    for (std::size_t i = 0; i < n_s; ++i) {
      LinearForm form{-1.0, {}};
      for (std::size_t c = 0; c <= m; ++c) form.add(layout.count(i, c), 1.0);
      acc.add_square(form, w.lambda2 / n);
    }
  }

  // 1 <= U <= M via one-hot slack bits.
  if (w.lambda3 != 0.0) {
    LinearForm equal;
    for (std::size_t j = 0; j < n_f; ++j) equal.add(layout.feature(j), 1.0);
    for (std::size_t u = 1; u <= m; ++u) {
      equal.add(layout.slack(u), -static_cast<double>(u));
    }
    acc.add_square(equal, w.lambda3);
    LinearForm onehot{-1.0, {}};
    for (std::size_t u = 1; u <= m; ++u) onehot.add(layout.slack(u), 1.0);
    acc.add_square(onehot, w.lambda3);
  }

  return std::move(acc).finish(layout, w);
}

FingerprintSet decode(const Assignment& a, const VariableLayout& layout) {
  if (a.size() != layout.total()) {
    throw ShapeError("decode: assignment has " + std::to_string(a.size()) +
                     " bits, layout expects " + std::to_string(layout.total()));
  }
  std::vector<std::size_t> selected;
  for (std::size_t j = 0; j < layout.n_f; ++j) {
    if (a.bits[layout.feature(j)]) selected.push_back(j);
  }
  if (selected.empty()) {
    throw EmptySelectionError("decode: no feature bit is set");
  }
  return FingerprintSet(std::move(selected));
}

DecodedSolution check_constraints(const Dataset& d, const Assignment& a,
                                  const VariableLayout& layout) {
  if (a.size() != layout.total()) {
    throw ShapeError("check_constraints: assignment has " + std::to_string(a.size()) +
                     " bits, layout expects " + std::to_string(layout.total()));
  }
  if (d.n_samples() != layout.n_s || d.n_fingerprints() != layout.n_f) {
    throw ShapeError("check_constraints: layout does not match the dataset");
  }
  DecodedSolution out;
  std::vector<std::size_t> selected;
  for (std::size_t j = 0; j < layout.n_f; ++j) {
    if (a.bits[layout.feature(j)]) selected.push_back(j);
  }
  out.fingerprint = FingerprintSet(std::move(selected));
  out.u = out.fingerprint.u();

  out.c1_residuals.resize(layout.n_s);
  out.c2_residuals.resize(layout.n_s);
  for (std::size_t i = 0; i < layout.n_s; ++i) {
    long unsatisfied = 0;
    for (auto j : out.fingerprint.selected()) unsatisfied += d.at(i, j) == 0;
    long encoded = 0;
    long hot = 0;
    for (std::size_t c = 0; c <= layout.m; ++c) {
      if (a.bits[layout.count(i, c)]) {
        encoded += static_cast<long>(c);
        ++hot;
      }
    }
    out.c1_residuals[i] = unsatisfied - encoded;
    out.c2_residuals[i] = hot - 1;
    out.c1_violations += out.c1_residuals[i] != 0;
    out.c2_violations += out.c2_residuals[i] != 0;
  }

  long slack_hot = 0;
  long slack_value = 0;
  for (std::size_t u = 1; u <= layout.m; ++u) {
    if (a.bits[layout.slack(u)]) {
      ++slack_hot;
      slack_value += static_cast<long>(u);
    }
  }
  out.c3_violated = slack_hot != 1 || slack_value != static_cast<long>(out.u);

  if (!out.fingerprint.empty()) {
    out.swmse = swmse(split_stats(d, out.fingerprint), d.n_samples());
  }
  out.valid = out.c1_violations == 0 && out.c2_violations == 0 && !out.c3_violated &&
              out.u >= 1 && out.u <= layout.m;
  return out;
}

Assignment encode(const Dataset& d, const FingerprintSet& f,
                  const VariableLayout& layout) {
  if (f.u() < 1 || f.u() > layout.m) {
    throw RangeError("encode: U=" + std::to_string(f.u()) + " outside [1, " +
                     std::to_string(layout.m) + "]");
  }
  f.check_bounds(layout.n_f);
  Assignment a{std::vector<std::uint8_t>(layout.total(), 0)};
  for (auto j : f.selected()) a.bits[layout.feature(j)] = 1;
  for (std::size_t i = 0; i < layout.n_s; ++i) {
    std::size_t unsatisfied = 0;
    for (auto j : f.selected()) unsatisfied += d.at(i, j) == 0;
    a.bits[layout.count(i, unsatisfied)] = 1;
  }
  a.bits[layout.slack(f.u())] = 1;
  return a;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("qubo text line " + std::to_string(line_no) +
                      ": bad number '" + s + "'");
  }
  return v;
}

std::uint32_t parse_index(const std::string& s, std::size_t line_no) {
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("qubo text line " + std::to_string(line_no) +
                      ": bad index '" + s + "'");
  }
  return v;
}

}  // namespace

void write_qubo(const QuboModel& q, std::ostream& out) {
  out << "offset " << format_double(q.offset()) << '\n';
  for (std::size_t l = 0; l < q.size(); ++l) {
    out << "l " << l << ' ' << format_double(q.linear()[l]) << '\n';
  }
  for (const auto& t : q.quadratic()) {
    out << "q " << t.i << ' ' << t.j << ' ' << format_double(t.value) << '\n';
  }
}

QuboModel read_qubo(std::istream& in) {
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> lin;
  std::vector<QuadraticTerm> quad;
  std::size_t n_vars = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string tag, a, b, c;
    ls >> tag;
    if (tag == "offset") {
      ls >> a;
      offset = parse_double(a, line_no);
    } else if (tag == "l") {
      ls >> a >> b;
      const std::size_t i = parse_index(a, line_no);
      lin.emplace_back(i, parse_double(b, line_no));
      n_vars = std::max(n_vars, i + 1);
    } else if (tag == "q") {
      ls >> a >> b >> c;
      const auto i = parse_index(a, line_no);
      const auto j = parse_index(b, line_no);
      if (i >= j) {
        throw FormatError("qubo text line " + std::to_string(line_no) +
                          ": quadratic term needs i < j");
      }
      quad.push_back({i, j, parse_double(c, line_no)});
      n_vars = std::max<std::size_t>(n_vars, j + 1);
    } else {
      throw FormatError("qubo text line " + std::to_string(line_no) +
                        ": unknown record '" + tag + "'");
    }
  }
  std::vector<double> linear(n_vars, 0.0);
  for (const auto& [i, v] : lin) linear[i] += v;
  return QuboModel::from_terms(n_vars, offset, std::move(linear), std::move(quad));
}

}  // namespace qubofp
