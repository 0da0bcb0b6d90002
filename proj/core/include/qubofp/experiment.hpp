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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qubofp/dataset.hpp"
#include "qubofp/qubo.hpp"
#include "qubofp/solver.hpp"
#include "qubofp/stump.hpp"

namespace qubofp {

/// Which samples decide whether a trial's fingerprint is effective.
enum class EvalSet { kSample, kFull, kBoth };

std::string_view to_string(EvalSet e) noexcept;
EvalSet parse_eval_set(std::string_view s);

struct TrialConfig {
  std::size_t n_samples = 0;
  std::size_t m = 2;
  std::size_t trials = 10;
  std::uint64_t seed = 0;

  std::size_t sweeps = 1000;
  std::size_t restarts = 1;
  /// Unset betas come from fingerprint_schedule for each trial's model.
  std::optional<double> beta_start;
  std::optional<double> beta_end;

  /// Explicit weights win over penalty_scale.
  std::optional<PenaltyWeights> weights;
  double penalty_scale = 1.0;

  EvalSet eval_set = EvalSet::kSample;
  std::size_t workers = 1;

  /// Throws RangeError on trials == 0 or n_samples outside [2, dataset size].
  void validate(const Dataset& d) const;
};

/// Stump errors of one fingerprint against the best single column.
struct Evaluation {
  double mse_interaction = 0.0;
  double mse_best_single = 0.0;
  std::size_t best_single_column = 0;
  bool effective = false;
};

struct TrialResult {
  std::size_t trial_id = 0;
  std::size_t n_samples = 0;
  std::size_t m = 0;
  DecodedSolution decoded;
  std::string fingerprint_string;
  std::size_t u = 0;
  double energy = 0.0;
  double mse_interaction = 0.0;
  double mse_best_single = 0.0;
  std::string best_single_name;
  bool effective = false;
  /// Present with EvalSet::kBoth: the same comparison on the full dataset.
  std::optional<Evaluation> full;
  /// Why the trial is not effective when it could not be scored.
  std::string reason;
  std::chrono::nanoseconds wall_time{0};
};

/// mse_interaction < mse_best_single, strictly.
bool effectiveness(double mse_interaction, double mse_best_single) noexcept;

/// Scores `f` and the best single column on `d`.
Evaluation evaluate(const Dataset& d, const FingerprintSet& f);

/// Runs cfg.trials independent trials: subsample (seed + trial_id, so a
/// trial sees the same rows for every M) -> build QUBO -> anneal -> refine
/// -> decode -> evaluate. A trial whose decoded set is empty or larger than
/// M is reported as not effective with a reason.
std::vector<TrialResult> run_trials(const Dataset& d, const TrialConfig& cfg);

struct OverlapMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;  // fraction of matching samples
};

/// Throws EmptyInputError for an empty list.
OverlapMatrix overlap_matrix(const Dataset& d, const std::vector<FingerprintSet>& fps);

struct ImportanceReport {
  std::vector<std::string> columns;  // base columns, then generated ones
  std::vector<double> scores;
  std::string model;
  std::size_t n_base = 0;

  /// Score of the generated fingerprint at position k of the input list.
  double generated_score(std::size_t k) const { return scores.at(n_base + k); }
};

/// Importance from a greedy variance-reduction regression tree fit on every
/// sample, using the base columns plus one column per generated fingerprint.
/// A column's score is the summed drop in squared error over the nodes that
/// split on it. Throws RangeError when depth == 0.
ImportanceReport importance(const Dataset& d, const std::vector<FingerprintSet>& generated,
                            std::size_t depth = 5);

struct ReportInput {
  std::vector<TrialConfig> configs;
  std::vector<TrialResult> results;
  std::optional<OverlapMatrix> overlap;
  std::optional<ImportanceReport> importance;
  /// Importance score for each effective trial, in results order.
  std::vector<std::optional<double>> trial_importance;
  std::string dataset;
};

/// Collects effective fingerprints (deduplicated, first occurrence wins),
/// computes their overlap matrix and tree importance on `d`, and attaches an
/// importance score to every effective trial.
ReportInput assemble_report(const Dataset& d, std::vector<TrialConfig> configs,
                            std::vector<TrialResult> results, std::size_t depth = 5,
                            std::string dataset_name = {});

/// Effective-trial counts keyed by (n_samples, m).
std::map<std::pair<std::size_t, std::size_t>, std::size_t> effective_counts(
    const std::vector<TrialResult>& results);

/// Writes report.json, table.csv (ID,N_S,M,U,I,fingerprint over effective
/// trials) and counts.csv (effective trials per N_S row and M column) into
/// `dir`, creating it if needed. Throws IoError on failure.
void emit_report(const ReportInput& input, const std::filesystem::path& dir);

/// JSON text of the report (canonical key order, 2-space indent).
std::string report_json(const ReportInput& input);

/// Rewrites table.csv and counts.csv from a saved report.json.
void emit_tables_from_json(const std::filesystem::path& report,
                           const std::filesystem::path& dir);

}  // namespace qubofp
