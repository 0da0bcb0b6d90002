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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "qubofp/errors.hpp"
#include "qubofp/experiment.hpp"
#include "qubofp/search.hpp"
#include "test_util.hpp"

namespace qubofp {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qubofp_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(EvalSet, Parse) {
  EXPECT_EQ(parse_eval_set("sample"), EvalSet::kSample);
  EXPECT_EQ(parse_eval_set(to_string(EvalSet::kBoth)), EvalSet::kBoth);
  EXPECT_THROW(parse_eval_set("train"), RangeError);
}

TEST(Effectiveness, StrictInequality) {
  EXPECT_TRUE(effectiveness(0.4, 0.5));
  EXPECT_FALSE(effectiveness(0.5, 0.5));
  EXPECT_FALSE(effectiveness(0.6, 0.5));
}

TEST(Evaluate, PlantedInteractionBeatsBestSingle) {
  std::mt19937_64 rng(1);
  const auto p = testing::planted_dataset(rng, 100, 6, {0, 1, 8});
  const Evaluation e = evaluate(p.data, p.truth);
  EXPECT_TRUE(e.effective);
  EXPECT_LT(e.mse_interaction, e.mse_best_single);
  EXPECT_EQ(evaluate(p.data, FingerprintSet{e.best_single_column}).effective, false);
}

TEST(TrialConfig, Validation) {
  std::mt19937_64 rng(2);
  const Dataset d = testing::random_dataset(rng, 10, 4);
  TrialConfig c;
  c.n_samples = 10;
  EXPECT_NO_THROW(c.validate(d));
  c.n_samples = 11;
  EXPECT_THROW(c.validate(d), RangeError);
  c.n_samples = 5;
  c.trials = 0;
  EXPECT_THROW(c.validate(d), RangeError);
  c.trials = 1;
  c.m = 5;
  EXPECT_THROW(c.validate(d), RangeError);
}

TrialConfig small_config(std::size_t n, std::size_t m) {
  TrialConfig c;
  c.n_samples = n;
  c.m = m;
  c.trials = 10;
  c.seed = 11;
  c.sweeps = 60;
  c.restarts = 1;
  return c;
}

TEST(RunTrials, CardinalityAndIds) {
  std::mt19937_64 rng(3);
  const Dataset d = testing::random_dataset(rng, 20, 6);
  const auto results = run_trials(d, small_config(15, 2));
  ASSERT_EQ(results.size(), 10u);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_EQ(results[k].trial_id, k);
    EXPECT_EQ(results[k].n_samples, 15u);
    EXPECT_EQ(results[k].m, 2u);
  }
}

TEST(RunTrials, Deterministic) {
  std::mt19937_64 rng(4);
  const Dataset d = testing::random_dataset(rng, 20, 6);
  const auto a = run_trials(d, small_config(15, 3));
  const auto b = run_trials(d, small_config(15, 3));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].decoded.fingerprint, b[k].decoded.fingerprint);
    EXPECT_EQ(a[k].energy, b[k].energy);
    EXPECT_EQ(a[k].effective, b[k].effective);
    EXPECT_EQ(a[k].fingerprint_string, b[k].fingerprint_string);
  }
}

TEST(RunTrials, EffectiveFlagMatchesDefinition) {
  std::mt19937_64 rng(5);
  const auto p = testing::planted_dataset(rng, 40, 5, {0, 1});
  TrialConfig c = small_config(30, 2);
  c.eval_set = EvalSet::kBoth;
  for (const auto& r : run_trials(p.data, c)) {
    if (r.decoded.fingerprint.empty()) {
      EXPECT_FALSE(r.effective);
      EXPECT_FALSE(r.reason.empty());
      continue;
    }
    EXPECT_EQ(r.effective, r.u <= c.m && effectiveness(r.mse_interaction, r.mse_best_single));
    ASSERT_TRUE(r.full.has_value());
    const Evaluation full = evaluate(p.data, r.decoded.fingerprint);
    EXPECT_EQ(r.full->mse_interaction, full.mse_interaction);
  }
}

TEST(RunTrials, SingleFingerprintIsNeverEffective) {
  std::mt19937_64 rng(6);
  const auto p = testing::planted_dataset(rng, 30, 4, {0});
  for (EvalSet e : {EvalSet::kSample, EvalSet::kFull}) {
    TrialConfig c = small_config(20, 1);
    c.eval_set = e;
    for (const auto& r : run_trials(p.data, c)) EXPECT_FALSE(r.effective);
  }
}

TEST(RunTrials, PlantedThreeWayInteraction) {
  std::mt19937_64 rng(7);
  const auto p = testing::planted_dataset(rng, 100, 15, {2, 5, 19});
  TrialConfig c;
  c.n_samples = 100;
  c.m = 3;
  c.trials = 10;
  c.seed = 3;
  c.restarts = 4;
  c.sweeps = 300;
  std::size_t effective = 0;
  for (const auto& r : run_trials(p.data, c)) effective += r.effective;
  EXPECT_GE(effective, 8u);
}

TEST(Overlap, Examples) {
  const Dataset d = augment_complements(Dataset::from_rows(
      {"a", "b", "c", "e"}, {"A", "B"}, {{1, 1}, {1, 0}, {0, 1}, {0, 0}}, {0, 1, 2, 3}));
  // A=0, B=1, NOT_A=2, NOT_B=3. A and B agree on rows a and e.
  const OverlapMatrix o = overlap_matrix(d, {{0}, {0}, {2}, {1}});
  EXPECT_EQ(o.values[0][1], 1.0);
  EXPECT_EQ(o.values[0][2], 0.0);
  EXPECT_EQ(o.values[0][3], 0.5);
  EXPECT_EQ(o.labels[2], "¬A");
  EXPECT_THROW(overlap_matrix(d, {}), EmptyInputError);
  EXPECT_THROW(overlap_matrix(d, {{7}}), RangeError);
}

TEST(Overlap, MatrixProperties) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset d = testing::random_dataset(rng, 13, 6);
    std::vector<FingerprintSet> fps;
    for (int k = 0; k < 5; ++k) {
      fps.push_back(FingerprintSet{static_cast<std::size_t>(rng() % 6)}.with(rng() % 6));
    }
    const OverlapMatrix o = overlap_matrix(d, fps);
    for (std::size_t a = 0; a < 5; ++a) {
      EXPECT_EQ(o.values[a][a], 1.0);
      for (std::size_t b = 0; b < 5; ++b) {
        EXPECT_EQ(o.values[a][b], o.values[b][a]);
        EXPECT_GE(o.values[a][b], 0.0);
        EXPECT_LE(o.values[a][b], 1.0);
        const auto ga = testing::product_by_rows(d, fps[a].selected());
        const auto gb = testing::product_by_rows(d, fps[b].selected());
        double match = 0;
        for (std::size_t i = 0; i < 13; ++i) match += ga[i] == gb[i];
        EXPECT_DOUBLE_EQ(o.values[a][b], match / 13.0);
      }
    }
  }
}

TEST(Importance, ConstantTargetGivesZeros) {
  std::mt19937_64 rng(9);
  Dataset r = testing::random_dataset(rng, 10, 4);
  std::vector<std::uint8_t> cols;
  for (std::size_t j = 0; j < 4; ++j) cols.insert(cols.end(), r.column(j).begin(), r.column(j).end());
  const Dataset d(r.ids(), r.feature_names(), cols, std::vector<double>(10, 2.0));
  const ImportanceReport rep = importance(d, {{0, 1}});
  ASSERT_EQ(rep.scores.size(), 5u);
  for (double s : rep.scores) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(rep.columns.back(), "F0∧F1");
  EXPECT_THROW(importance(d, {}, 0), RangeError);
}

TEST(Importance, PerfectColumnTakesRootReduction) {
  const Dataset d = Dataset::from_rows({"a", "b", "c", "e"}, {"A", "B"},
                                       {{0, 1}, {1, 1}, {0, 0}, {1, 0}}, {0.0, 4.0, 0.0, 4.0});
  const ImportanceReport rep = importance(d, {}, 1);
  EXPECT_DOUBLE_EQ(rep.scores[0], 16.0);
  EXPECT_EQ(rep.scores[1], 0.0);
}

// Independent tree builder: node SSE from sums of squares, best split by
// full scan with lowest index on ties.
void oracle_tree(const Dataset& d, const std::vector<std::vector<std::uint8_t>>& cols,
                 const std::vector<std::size_t>& rows, std::size_t depth,
                 std::vector<double>& scores) {
  auto node_sse = [&](const std::vector<std::size_t>& r) {
    double s = 0, s2 = 0;
    for (auto i : r) {
      s += d.targets()[i];
      s2 += d.targets()[i] * d.targets()[i];
    }
    return r.empty() ? 0.0 : s2 - s * s / static_cast<double>(r.size());
  };
  if (depth == 0 || rows.size() < 2) return;
  const double parent = node_sse(rows);
  double best = 1e-12 * std::max(1.0, parent);
  std::size_t arg = cols.size();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::vector<std::size_t> l, r;
    for (auto i : rows) (cols[c][i] ? l : r).push_back(i);
    if (l.empty() || r.empty()) continue;
    const double gain = parent - node_sse(l) - node_sse(r);
    if (gain > best * (1 + 1e-9)) {
      best = gain;
      arg = c;
    }
  }
  if (arg == cols.size()) return;
  scores[arg] += best;
  std::vector<std::size_t> l, r;
  for (auto i : rows) (cols[arg][i] ? l : r).push_back(i);
  oracle_tree(d, cols, l, depth - 1, scores);
  oracle_tree(d, cols, r, depth - 1, scores);
}

TEST(Importance, MatchesIndependentTreeBuilder) {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 30; ++rep) {
    const Dataset d = testing::random_dataset(rng, 16, 5);
    const std::vector<FingerprintSet> gen{{0, 1}, {2, 3, 4}};
    std::vector<std::vector<std::uint8_t>> cols;
    for (std::size_t j = 0; j < 5; ++j) cols.emplace_back(d.column(j).begin(), d.column(j).end());
    for (const auto& f : gen) cols.push_back(testing::product_by_rows(d, f.selected()));
    std::vector<double> expect(cols.size(), 0.0);
    std::vector<std::size_t> rows(16);
    std::iota(rows.begin(), rows.end(), 0);
    oracle_tree(d, cols, rows, 2, expect);
    const ImportanceReport got = importance(d, gen, 2);
    ASSERT_EQ(got.scores.size(), expect.size());
    for (std::size_t c = 0; c < expect.size(); ++c) {
      EXPECT_NEAR(got.scores[c], expect[c], 1e-9) << "rep " << rep << " column " << c;
      EXPECT_GE(got.scores[c], 0.0);
    }
    EXPECT_EQ(got.generated_score(1), got.scores[6]);
  }
}

TrialResult fake_trial(std::size_t id, std::size_t n, std::size_t m, bool effective,
                       FingerprintSet f, std::string text) {
  TrialResult r;
  r.trial_id = id;
  r.n_samples = n;
  r.m = m;
  r.u = f.u();
  r.decoded.fingerprint = std::move(f);
  r.decoded.u = r.u;
  r.decoded.valid = true;
  r.fingerprint_string = std::move(text);
  r.effective = effective;
  return r;
}

TEST(EmitReport, EmptyResults) {
  const fs::path dir = scratch_dir("empty");
  ReportInput in;
  in.configs.push_back(small_config(50, 2));
  emit_report(in, dir);
  EXPECT_EQ(slurp(dir / "table.csv"), "ID,N_S,M,U,I,fingerprint\n");
  EXPECT_EQ(slurp(dir / "counts.csv"), "N_S,M=2\n50,0\n");
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(j.at("trials").empty());
  EXPECT_EQ(j.at("effective_counts").at("50,2"), 0);
  for (const char* key : {"config", "trials", "overlap", "importance", "effective_counts"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(EmitReport, JsonRoundTripIsByteIdentical) {
  std::mt19937_64 rng(11);
  const auto p = testing::planted_dataset(rng, 30, 4, {0, 1});
  const TrialConfig c = small_config(20, 2);
  const ReportInput in = assemble_report(p.data, {c}, run_trials(p.data, c), 3, "planted");
  const fs::path dir = scratch_dir("roundtrip");
  emit_report(in, dir);
  const std::string text = slurp(dir / "report.json");
  EXPECT_EQ(text, report_json(in));
  EXPECT_EQ(nlohmann::json::parse(text).dump(2) + "\n", text);

  const fs::path again = scratch_dir("roundtrip_again");
  emit_tables_from_json(dir / "report.json", again);
  EXPECT_EQ(slurp(again / "table.csv"), slurp(dir / "table.csv"));
  EXPECT_EQ(slurp(again / "counts.csv"), slurp(dir / "counts.csv"));
}

TEST(EmitReport, TableRowShape) {
  const Dataset d = Dataset::from_rows({"a", "b"}, {"RING", "QCH3", "NOT_QCH3"},
                                       {{1, 0, 1}, {0, 1, 0}}, {1.0, 0.0});
  EXPECT_EQ(render_fingerprint(d, {0, 2}), "RING∧¬QCH3");
  ReportInput in;
  TrialConfig c = small_config(50, 4);
  in.configs = {c};
  for (std::size_t k = 0; k < 3; ++k) in.results.push_back(fake_trial(k, 50, 4, true, {0}, "RING"));
  in.results.push_back(fake_trial(3, 50, 4, false, {1}, "QCH3"));
  in.results.push_back(fake_trial(4, 50, 4, true, {0, 2}, render_fingerprint(d, {0, 2})));
  in.trial_importance = {1.0, 1.0, 1.0, std::nullopt, 1756.0};
  const fs::path dir = scratch_dir("row");
  emit_report(in, dir);
  std::istringstream table(slurp(dir / "table.csv"));
  std::vector<std::string> lines;
  for (std::string line; std::getline(table, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "ID,N_S,M,U,I,fingerprint");
  EXPECT_EQ(lines[4], "4,50,4,2,1756,RING∧¬QCH3");
  EXPECT_EQ(slurp(dir / "counts.csv"), "N_S,M=4\n50,4\n");
}

TEST(EmitReport, CountsMatchEffectiveTrials) {
  std::mt19937_64 rng(12);
  const auto p = testing::planted_dataset(rng, 40, 5, {0, 3});
  std::vector<TrialConfig> configs;
  std::vector<TrialResult> all;
  for (std::size_t n : {20u, 40u}) {
    for (std::size_t m : {1u, 2u}) {
      TrialConfig c = small_config(n, m);
      c.trials = 4;
      configs.push_back(c);
      auto r = run_trials(p.data, c);
      all.insert(all.end(), r.begin(), r.end());
    }
  }
  const ReportInput in = assemble_report(p.data, configs, all);
  const auto j = nlohmann::json::parse(report_json(in));
  const auto counts = effective_counts(all);
  for (const auto& c : configs) {
    std::size_t expect = 0;
    for (const auto& r : all) expect += r.effective && r.n_samples == c.n_samples && r.m == c.m;
    const auto key = std::to_string(c.n_samples) + "," + std::to_string(c.m);
    EXPECT_EQ(j.at("effective_counts").at(key).get<std::size_t>(), expect) << key;
    EXPECT_EQ(counts.at({c.n_samples, c.m}), expect);
    if (c.m == 1) EXPECT_EQ(expect, 0u);
  }
  std::size_t rows = 0;
  for (const auto& r : all) rows += r.effective;
  EXPECT_EQ(j.at("trials").size(), all.size());
  if (in.importance) {
    for (double s : in.importance->scores) EXPECT_GE(s, 0.0);
  }
  EXPECT_EQ(rows == 0, !in.overlap.has_value());
}

TEST(EmitReport, UnwritablePath) {
  const fs::path file = scratch_dir("blocker");
  { std::ofstream(file) << "x"; }
  EXPECT_THROW(emit_report(ReportInput{}, file / "sub"), IoError);
  EXPECT_THROW(emit_tables_from_json(file / "missing.json", scratch_dir("never")), IoError);
}

}  // namespace
}  // namespace qubofp
