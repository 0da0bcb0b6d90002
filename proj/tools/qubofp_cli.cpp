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

// qubofp: search for effective interaction fingerprints via a QUBO.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qubofp/dataset.hpp"
#include "qubofp/errors.hpp"
#include "qubofp/experiment.hpp"
#include "qubofp/qubo.hpp"
#include "qubofp/search.hpp"
#include "qubofp/solver.hpp"
#include "qubofp/stump.hpp"

namespace {

using nlohmann::json;
using namespace qubofp;

struct DatasetArgs {
  std::string path;
  bool augment = false;
  bool center = false;
  std::optional<std::size_t> n_samples;
  std::uint64_t seed = 0;

  void add_to(CLI::App* app, bool with_subsample = true) {
    app->add_option("--dataset", path, "Dataset CSV (id,target,<fingerprints>)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_flag("--augment", augment, "Append NOT_<name> complement columns");
    app->add_flag("--center", center, "Shift targets to zero mean");
    if (with_subsample) {
      app->add_option("--n-samples", n_samples, "Subsample this many rows");
      app->add_option("--seed", seed, "Subsampling seed");
    }
  }

  Dataset load() const {
    Dataset d = load_dataset(path);
    if (augment) d = augment_complements(d);
    if (center) d = center_targets(d);
    if (n_samples) d = subsample(d, *n_samples, seed);
    return d;
  }
};

// "OH,RING,NOT_N", "OH∧RING∧¬N" and mixtures of both are accepted.
FingerprintSet parse_fingerprint(const Dataset& d, const std::string& text) {
  std::vector<std::size_t> idx;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::string name = token;
    const std::string neg = "¬";
    if (name.rfind(neg, 0) == 0) name = std::string(kComplementPrefix) + name.substr(neg.size());
    idx.push_back(d.column_index(name));
    token.clear();
  };
  const std::string conj = "∧";
  for (std::size_t k = 0; k < text.size();) {
    if (text[k] == ',') {
      flush();
      ++k;
    } else if (text.compare(k, conj.size(), conj) == 0) {
      flush();
      k += conj.size();
    } else {
      token += text[k++];
    }
  }
  flush();
  return FingerprintSet(std::move(idx));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

int run_search(const DatasetArgs& data, const std::vector<std::size_t>& ms,
               std::vector<std::size_t> sizes, const TrialConfig& base,
               std::size_t depth, const std::string& out) {
  DatasetArgs full_args = data;
  full_args.n_samples.reset();
  const Dataset d = full_args.load();
  if (sizes.empty()) sizes.push_back(d.n_samples());

  std::vector<TrialConfig> configs;
  std::vector<TrialResult> results;
  for (auto n : sizes) {
    for (auto m : ms) {
      TrialConfig cfg = base;
      cfg.n_samples = n;
      cfg.m = m;
      auto r = run_trials(d, cfg);
      std::size_t effective = 0;
      for (const auto& t : r) effective += t.effective;
      std::cerr << "N_S=" << n << " M=" << m << ": " << effective << "/" << r.size()
                << " trials effective\n";
      configs.push_back(cfg);
      results.insert(results.end(), r.begin(), r.end());
    }
  }
  const ReportInput report =
      assemble_report(d, std::move(configs), std::move(results), depth, data.path);
  emit_report(report, out);
  std::cerr << "report written to " << out << "\n";
  return 0;
}

json search_to_json(const Dataset& d, const SearchResult& r, std::size_t m, Objective o) {
  const auto counts = count_combinations(d.n_fingerprints(), m);
  return {{"fingerprint", render_fingerprint(d, r.best)},
          {"fingerprint_indices", r.best.selected()},
          {"u", r.best.u()},
          {"m", m},
          {"objective", std::string(to_string(o))},
          {"swmse", r.swmse},
          {"mse", r.mse},
          {"candidates_evaluated", r.candidates_evaluated},
          {"combinations_exact_m", counts.exact_m},
          {"combinations_cumulative", counts.cumulative},
          {"wall_time_ms", std::chrono::duration<double, std::milli>(r.wall_time).count()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interaction-fingerprint search through a QUBO decision stump"};
  app.require_subcommand(1);

  // search
  DatasetArgs search_data;
  std::vector<std::size_t> search_m{2};
  std::vector<std::size_t> search_sizes;
  TrialConfig search_cfg;
  std::string eval_set = "sample";
  std::size_t depth = 5;
  std::string search_out;
  auto* search = app.add_subcommand("search", "Run annealing trials and write a report");
  search_data.add_to(search, false);
  search->add_option("--m", search_m, "Maximum producted fingerprints (one or more)");
  search->add_option("--n-samples", search_sizes, "Sample sizes (one or more; default all rows)");
  search->add_option("--trials", search_cfg.trials, "Trials per (N_S, M)");
  search->add_option("--seed", search_cfg.seed, "Base seed");
  search->add_option("--sweeps", search_cfg.sweeps, "Annealing sweeps");
  search->add_option("--restarts", search_cfg.restarts, "Annealing restarts per trial");
  search->add_option("--penalty-scale", search_cfg.penalty_scale, "Penalty weight multiplier")
      ->check(CLI::NonNegativeNumber);
  search->add_option("--eval-set", eval_set, "Samples judging effectiveness")
      ->check(CLI::IsMember({"sample", "full", "both"}));
  search->add_option("--depth", depth, "Depth of the importance tree");
  search->add_option("--workers", search_cfg.workers, "Concurrent restarts (0 = all cores)");
  search->add_option("--out", search_out, "Output directory")->required();

  // fullsearch
  DatasetArgs full_data;
  std::size_t full_m = 2;
  std::string objective = "swmse";
  std::uint64_t budget = 100'000'000;
  std::size_t full_workers = 1;
  std::string full_out;
  auto* full = app.add_subcommand("fullsearch", "Exhaustive search over fingerprint sets");
  full_data.add_to(full);
  full->add_option("--m", full_m, "Maximum producted fingerprints");
  full->add_option("--objective", objective, "Objective to minimize")
      ->check(CLI::IsMember({"swmse", "mse"}));
  full->add_option("--budget", budget, "Maximum number of candidates");
  full->add_option("--workers", full_workers, "Worker threads (0 = all cores)");
  full->add_option("--out", full_out, "Output JSON file (default stdout)");

  // evaluate
  DatasetArgs eval_data;
  std::string eval_fp;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score one interaction fingerprint");
  eval_data.add_to(evaluate_cmd);
  evaluate_cmd->add_option("--fingerprint", eval_fp, "Names joined by ',' or '∧'")->required();

  // overlap
  DatasetArgs overlap_data;
  std::vector<std::string> overlap_fps;
  std::string overlap_report;
  std::string overlap_out;
  auto* overlap = app.add_subcommand("overlap", "Match fractions between fingerprints");
  overlap_data.add_to(overlap);
  overlap->add_option("--fingerprint", overlap_fps, "Fingerprint (repeatable)");
  overlap->add_option("--report", overlap_report, "Take effective fingerprints from a report.json")
      ->check(CLI::ExistingFile);
  overlap->add_option("--out", overlap_out, "Output CSV (default stdout)");

  // report
  std::string report_in;
  std::string report_out = ".";
  auto* report = app.add_subcommand("report", "Regenerate table.csv and counts.csv from report.json");
  report->add_option("--report", report_in, "report.json")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Output directory");

  // export-qubo
  DatasetArgs export_data;
  std::size_t export_m = 2;
  double export_scale = 1.0;
  std::string export_out;
  auto* exporter = app.add_subcommand("export-qubo", "Write the QUBO in plain text");
  export_data.add_to(exporter);
  exporter->add_option("--m", export_m, "Maximum producted fingerprints");
  exporter->add_option("--penalty-scale", export_scale, "Penalty weight multiplier")
      ->check(CLI::NonNegativeNumber);
  exporter->add_option("--out", export_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*search) {
      search_cfg.eval_set = parse_eval_set(eval_set);
      return run_search(search_data, search_m, search_sizes, search_cfg, depth, search_out);
    }
    if (*full) {
      const Dataset d = full_data.load();
      FullSearchOptions opts;
      opts.objective = parse_objective(objective);
      opts.budget = budget;
      opts.workers = full_workers;
      const auto r = full_search(d, full_m, opts);
      write_text(full_out, search_to_json(d, r, full_m, opts.objective).dump(2) + "\n");
      return 0;
    }
    if (*evaluate_cmd) {
      const Dataset d = eval_data.load();
      const FingerprintSet f = parse_fingerprint(d, eval_fp);
      const auto s = split_stats(d, f);
      const auto e = evaluate(d, f);
      const json j = {{"fingerprint", render_fingerprint(d, f)},
                      {"u", f.u()},
                      {"n_samples", d.n_samples()},
                      {"n1", s.n1},
                      {"n0", s.n0},
                      {"mse", e.mse_interaction},
                      {"swmse", swmse(s, d.n_samples())},
                      {"best_single", d.feature_names()[e.best_single_column]},
                      {"mse_best_single", e.mse_best_single},
                      {"effective", e.effective}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*overlap) {
      const Dataset d = overlap_data.load();
      std::vector<FingerprintSet> fps;
      for (const auto& text : overlap_fps) fps.push_back(parse_fingerprint(d, text));
      if (!overlap_report.empty()) {
        std::ifstream in(overlap_report);
        const json j = json::parse(in);
        for (const auto& t : j.at("trials")) {
          if (!t.at("effective").get<bool>()) continue;
          FingerprintSet f(t.at("fingerprint_indices").get<std::vector<std::size_t>>());
          if (std::find(fps.begin(), fps.end(), f) == fps.end()) fps.push_back(f);
        }
      }
      const auto m = overlap_matrix(d, fps);
      std::string csv = "fingerprint";
      for (const auto& l : m.labels) csv += "," + l;
      csv += "\n";
      for (std::size_t a = 0; a < m.labels.size(); ++a) {
        csv += m.labels[a];
        for (double v : m.values[a]) {
          char buf[32];
          std::snprintf(buf, sizeof buf, ",%.4f", v);
          csv += buf;
        }
        csv += "\n";
      }
      write_text(overlap_out, csv);
      return 0;
    }
    if (*report) {
      emit_tables_from_json(report_in, report_out);
      return 0;
    }
    if (*exporter) {
      const Dataset d = export_data.load();
      const auto q = build_qubo(d, export_m, default_penalty_weights(d, export_scale));
      if (export_out.empty() || export_out == "-") {
        write_qubo(q, std::cout);
      } else {
        std::ofstream out(export_out);
        if (!out) throw IoError("cannot write '" + export_out + "'");
        write_qubo(q, out);
      }
      return 0;
    }
  } catch (const qubofp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
