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

#include "qubofp/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qubofp/errors.hpp"

namespace qubofp {

using nlohmann::json;

std::string_view to_string(EvalSet e) noexcept {
  switch (e) {
    case EvalSet::kSample: return "sample";
    case EvalSet::kFull: return "full";
    case EvalSet::kBoth: return "both";
  }
  return "sample";
}

EvalSet parse_eval_set(std::string_view s) {
  if (s == "sample") return EvalSet::kSample;
  if (s == "full") return EvalSet::kFull;
  if (s == "both") return EvalSet::kBoth;
  throw RangeError("unknown evaluation set '" + std::string(s) +
                   "' (expected sample, full or both)");
}

void TrialConfig::validate(const Dataset& d) const {
  if (trials < 1) throw RangeError("trial config: trials must be >= 1");
  if (n_samples < 2 || n_samples > d.n_samples()) {
    throw RangeError("trial config: n_samples=" + std::to_string(n_samples) +
                     " outside [2, " + std::to_string(d.n_samples()) + "]");
  }
  if (m < 1 || m > d.n_fingerprints()) {
    throw RangeError("trial config: M=" + std::to_string(m) + " outside [1, " +
                     std::to_string(d.n_fingerprints()) + "]");
  }
  if (restarts < 1) throw RangeError("trial config: restarts must be >= 1");
}

bool effectiveness(double mse_interaction, double mse_best_single) noexcept {
  return mse_interaction < mse_best_single;
}

Evaluation evaluate(const Dataset& d, const FingerprintSet& f) {
  Evaluation e;
  e.mse_interaction = mse(split_stats(d, f), d.n_samples());
  const auto base = best_single_baseline(d);
  e.mse_best_single = base.mse;
  e.best_single_column = base.column;
  e.effective = effectiveness(e.mse_interaction, e.mse_best_single);
  return e;
}

namespace {

// Trial k anneals with its own seed stream, disjoint from other trials'
// restart seeds for any realistic restart count.
constexpr std::uint64_t kTrialSeedStride = 0x9E3779B97F4A7C15ull;

TrialResult run_one(const Dataset& full, const TrialConfig& cfg, std::size_t k) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialResult r;
  r.trial_id = k;
  r.n_samples = cfg.n_samples;
  r.m = cfg.m;

  const Dataset sample = subsample(full, cfg.n_samples, cfg.seed + k);
  const PenaltyWeights w = cfg.weights.value_or(default_penalty_weights(sample, cfg.penalty_scale));
  const QuboModel q = build_qubo(sample, cfg.m, w);

  AnnealSchedule s = fingerprint_schedule(q, sample, cfg.sweeps, cfg.restarts,
                                          cfg.seed ^ (kTrialSeedStride * (k + 1)));
  if (cfg.beta_start) s.beta_start = *cfg.beta_start;
  if (cfg.beta_end) s.beta_end = *cfg.beta_end;
  const FingerprintMoves moves(sample, q.layout());
  const auto annealed = simulated_anneal(q, s, moves, cfg.workers);
  const Assignment refined = refine_local(q, annealed.assignment);
  r.energy = q.energy(refined);
  r.decoded = check_constraints(sample, refined, q.layout());
  r.u = r.decoded.u;

  if (r.decoded.fingerprint.empty()) {
    r.reason = "no fingerprint selected";
  } else {
    r.fingerprint_string = render_fingerprint(sample, r.decoded.fingerprint);
    const Dataset& primary = cfg.eval_set == EvalSet::kFull ? full : sample;
    const Evaluation e = evaluate(primary, r.decoded.fingerprint);
    r.mse_interaction = e.mse_interaction;
    r.mse_best_single = e.mse_best_single;
    r.best_single_name = primary.feature_names()[e.best_single_column];
    r.effective = e.effective;
    if (cfg.eval_set == EvalSet::kBoth) r.full = evaluate(full, r.decoded.fingerprint);
    if (r.u > cfg.m) {
      r.effective = false;
      r.reason = "U=" + std::to_string(r.u) + " exceeds M=" + std::to_string(cfg.m);
    }
  }
  r.wall_time = std::chrono::steady_clock::now() - t0;
  return r;
}

}  // namespace

std::vector<TrialResult> run_trials(const Dataset& d, const TrialConfig& cfg) {
  cfg.validate(d);
  std::vector<TrialResult> out;
  out.reserve(cfg.trials);
  for (std::size_t k = 0; k < cfg.trials; ++k) out.push_back(run_one(d, cfg, k));
  return out;
}

OverlapMatrix overlap_matrix(const Dataset& d, const std::vector<FingerprintSet>& fps) {
  if (fps.empty()) throw EmptyInputError("overlap_matrix: no fingerprints given");
  if (d.n_samples() == 0) throw DegenerateError("overlap_matrix: dataset has no samples");
  std::vector<std::vector<std::uint8_t>> g;
  OverlapMatrix out;
  for (const auto& f : fps) {
    g.push_back(interaction_values(d, f));
    out.labels.push_back(render_fingerprint(d, f));
  }
  const double n = static_cast<double>(d.n_samples());
  out.values.assign(fps.size(), std::vector<double>(fps.size(), 1.0));
  for (std::size_t a = 0; a < fps.size(); ++a) {
    for (std::size_t b = a + 1; b < fps.size(); ++b) {
      std::size_t match = 0;
      for (std::size_t i = 0; i < d.n_samples(); ++i) match += g[a][i] == g[b][i];
      out.values[a][b] = out.values[b][a] = static_cast<double>(match) / n;
    }
  }
  return out;
}

namespace {

double sse(std::span<const double> t, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  double mean = 0.0;
  for (auto i : rows) mean += t[i];
  mean /= static_cast<double>(rows.size());
  double out = 0.0;
  for (auto i : rows) out += (t[i] - mean) * (t[i] - mean);
  return out;
}

struct TreeContext {
  std::span<const double> targets;
  std::vector<std::vector<std::uint8_t>> columns;
  std::vector<double> scores;
};

void grow(TreeContext& ctx, const std::vector<std::size_t>& rows, std::size_t depth_left) {
  if (depth_left == 0 || rows.size() < 2) return;
  const double parent = sse(ctx.targets, rows);
  if (parent <= 0.0) return;
  double best_gain = 0.0;
  std::size_t best_col = ctx.columns.size();
  std::vector<std::size_t> left, right;
  for (std::size_t c = 0; c < ctx.columns.size(); ++c) {
    left.clear();
    right.clear();
    for (auto i : rows) (ctx.columns[c][i] ? left : right).push_back(i);
    if (left.empty() || right.empty()) continue;
    const double gain = parent - sse(ctx.targets, left) - sse(ctx.targets, right);
    if (gain > best_gain) {
      best_gain = gain;
      best_col = c;
    }
  }
  if (best_col == ctx.columns.size()) return;
  ctx.scores[best_col] += best_gain;
  left.clear();
  right.clear();
  for (auto i : rows) (ctx.columns[best_col][i] ? left : right).push_back(i);
  grow(ctx, left, depth_left - 1);
  grow(ctx, right, depth_left - 1);
}

}  // namespace

ImportanceReport importance(const Dataset& d, const std::vector<FingerprintSet>& generated,
                            std::size_t depth) {
  if (depth == 0) throw RangeError("importance: depth must be >= 1");
  ImportanceReport out;
  out.n_base = d.n_fingerprints();
  TreeContext ctx{d.targets(), {}, {}};
  for (std::size_t j = 0; j < d.n_fingerprints(); ++j) {
    const auto col = d.column(j);
    ctx.columns.emplace_back(col.begin(), col.end());
    out.columns.push_back(d.feature_names()[j]);
  }
  for (const auto& f : generated) {
    ctx.columns.push_back(interaction_values(d, f));
    out.columns.push_back(render_fingerprint(d, f));
  }
  ctx.scores.assign(ctx.columns.size(), 0.0);
  std::vector<std::size_t> rows(d.n_samples());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  grow(ctx, rows, depth);
  out.scores = std::move(ctx.scores);
  out.model = "greedy variance-reduction regression tree, max depth " + std::to_string(depth) +
              ", " + std::to_string(d.n_samples()) + " samples";
  return out;
}

ReportInput assemble_report(const Dataset& d, std::vector<TrialConfig> configs,
                            std::vector<TrialResult> results, std::size_t depth,
                            std::string dataset_name) {
  ReportInput out;
  out.configs = std::move(configs);
  out.results = std::move(results);
  out.dataset = std::move(dataset_name);

  std::vector<FingerprintSet> unique;
  std::vector<std::optional<std::size_t>> slot(out.results.size());
  for (std::size_t k = 0; k < out.results.size(); ++k) {
    const auto& r = out.results[k];
    if (!r.effective) continue;
    const auto& f = r.decoded.fingerprint;
    auto it = std::find(unique.begin(), unique.end(), f);
    if (it == unique.end()) it = unique.insert(unique.end(), f);
    slot[k] = static_cast<std::size_t>(it - unique.begin());
  }
  out.trial_importance.assign(out.results.size(), std::nullopt);
  if (!unique.empty()) {
    out.overlap = overlap_matrix(d, unique);
    out.importance = importance(d, unique, depth);
    for (std::size_t k = 0; k < slot.size(); ++k) {
      if (slot[k]) out.trial_importance[k] = out.importance->generated_score(*slot[k]);
    }
  }
  return out;
}

std::map<std::pair<std::size_t, std::size_t>, std::size_t> effective_counts(
    const std::vector<TrialResult>& results) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> out;
  for (const auto& r : results) {
    auto& cell = out[{r.n_samples, r.m}];
    if (r.effective) ++cell;
  }
  return out;
}

namespace {

json to_json(const TrialConfig& c) {
  json j;
  j["n_samples"] = c.n_samples;
  j["m"] = c.m;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["sweeps"] = c.sweeps;
  j["restarts"] = c.restarts;
  j["beta_start"] = c.beta_start ? json(*c.beta_start) : json(nullptr);
  j["beta_end"] = c.beta_end ? json(*c.beta_end) : json(nullptr);
  j["penalty_scale"] = c.penalty_scale;
  if (c.weights) {
    j["weights"] = {{"lambda1", c.weights->lambda1},
                    {"lambda2", c.weights->lambda2},
                    {"lambda3", c.weights->lambda3}};
  } else {
    j["weights"] = nullptr;
  }
  j["eval_set"] = std::string(to_string(c.eval_set));
  return j;
}

json to_json(const Evaluation& e) {
  return {{"mse_interaction", e.mse_interaction},
          {"mse_best_single", e.mse_best_single},
          {"best_single_column", e.best_single_column},
          {"effective", e.effective}};
}

json to_json(const TrialResult& r, const std::optional<double>& imp) {
  json j;
  j["trial_id"] = r.trial_id;
  j["n_samples"] = r.n_samples;
  j["m"] = r.m;
  j["u"] = r.u;
  j["fingerprint"] = r.fingerprint_string;
  j["fingerprint_indices"] = r.decoded.fingerprint.selected();
  j["energy"] = r.energy;
  j["swmse"] = r.decoded.swmse ? json(*r.decoded.swmse) : json(nullptr);
  j["mse_interaction"] = r.mse_interaction;
  j["mse_best_single"] = r.mse_best_single;
  j["best_single"] = r.best_single_name;
  j["effective"] = r.effective;
  j["valid"] = r.decoded.valid;
  j["c1_violations"] = r.decoded.c1_violations;
  j["c2_violations"] = r.decoded.c2_violations;
  j["c3_violated"] = r.decoded.c3_violated;
  j["reason"] = r.reason;
  j["full"] = r.full ? to_json(*r.full) : json(nullptr);
  j["importance"] = imp ? json(*imp) : json(nullptr);
  j["wall_time_ms"] = std::chrono::duration<double, std::milli>(r.wall_time).count();
  return j;
}

std::string number_text(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Quotes a CSV field when it contains a delimiter or quote.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_tables(const json& report, const std::filesystem::path& dir) {
  std::ostringstream table;
  table << "ID,N_S,M,U,I,fingerprint\n";
  std::size_t id = 0;
  for (const auto& t : report.at("trials")) {
    if (!t.at("effective").get<bool>()) continue;
    table << ++id << ',' << t.at("n_samples").get<std::size_t>() << ','
          << t.at("m").get<std::size_t>() << ',' << t.at("u").get<std::size_t>() << ','
          << (t.at("importance").is_null() ? std::string()
                                           : number_text(t.at("importance").get<double>()))
          << ',' << csv_field(t.at("fingerprint").get<std::string>()) << '\n';
  }
  write_file(dir / "table.csv", table.str());

  std::set<std::size_t> ns, ms;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cells;
  for (const auto& [key, count] : report.at("effective_counts").items()) {
    const auto comma = key.find(',');
    const auto n = std::stoull(key.substr(0, comma));
    const auto m = std::stoull(key.substr(comma + 1));
    ns.insert(n);
    ms.insert(m);
    cells[{n, m}] = count.get<std::size_t>();
  }
  std::ostringstream counts;
  counts << "N_S";
  for (auto m : ms) counts << ",M=" << m;
  counts << '\n';
  for (auto n : ns) {
    counts << n;
    for (auto m : ms) {
      const auto it = cells.find({n, m});
      counts << ',' << (it == cells.end() ? 0 : it->second);
    }
    counts << '\n';
  }
  write_file(dir / "counts.csv", counts.str());
}

json build_report(const ReportInput& in) {
  json report;
  json configs = json::array();
  for (const auto& c : in.configs) configs.push_back(to_json(c));
  report["config"] = {{"dataset", in.dataset}, {"runs", configs}};

  json trials = json::array();
  for (std::size_t k = 0; k < in.results.size(); ++k) {
    const auto imp = k < in.trial_importance.size() ? in.trial_importance[k] : std::nullopt;
    trials.push_back(to_json(in.results[k], imp));
  }
  report["trials"] = trials;

  if (in.overlap) {
    report["overlap"] = {{"labels", in.overlap->labels}, {"values", in.overlap->values}};
  } else {
    report["overlap"] = {{"labels", json::array()}, {"values", json::array()}};
  }
  if (in.importance) {
    json scores = json::array();
    for (std::size_t k = 0; k < in.importance->columns.size(); ++k) {
      scores.push_back({{"column", in.importance->columns[k]},
                        {"score", in.importance->scores[k]},
                        {"generated", k >= in.importance->n_base}});
    }
    report["importance"] = {{"model", in.importance->model}, {"scores", scores}};
  } else {
    report["importance"] = {{"model", nullptr}, {"scores", json::array()}};
  }

  json counts = json::object();
  for (const auto& c : in.configs) {
    counts[std::to_string(c.n_samples) + "," + std::to_string(c.m)] = 0;
  }
  for (const auto& [key, n] : effective_counts(in.results)) {
    counts[std::to_string(key.first) + "," + std::to_string(key.second)] = n;
  }
  report["effective_counts"] = counts;
  return report;
}

}  // namespace

std::string report_json(const ReportInput& input) {
  return build_report(input).dump(2) + "\n";
}

void emit_report(const ReportInput& input, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  const json report = build_report(input);
  write_file(dir / "report.json", report.dump(2) + "\n");
  write_tables(report, dir);
}

void emit_tables_from_json(const std::filesystem::path& report,
                           const std::filesystem::path& dir) {
  std::ifstream in(report);
  if (!in) throw IoError("cannot open report '" + report.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("report '" + report.string() + "': " + e.what());
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_tables(j, dir);
}

}  // namespace qubofp
