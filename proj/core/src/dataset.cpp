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

#include "qubofp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "qubofp/errors.hpp"

namespace qubofp {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  return s;
}

std::string where(std::string_view source, std::size_t line) {
  std::ostringstream os;
  os << source << ":" << line;
  return os.str();
}

}  // namespace

Dataset::Dataset(std::vector<std::string> ids,
                 std::vector<std::string> feature_names,
                 std::vector<std::uint8_t> columns, std::vector<double> targets)
    : ids_(std::move(ids)),
      feature_names_(std::move(feature_names)),
      columns_(std::move(columns)),
      targets_(std::move(targets)) {
  if (ids_.size() != targets_.size()) {
    throw ShapeError("dataset: " + std::to_string(ids_.size()) + " ids but " +
                     std::to_string(targets_.size()) + " targets");
  }
  if (columns_.size() != targets_.size() * feature_names_.size()) {
    throw ShapeError("dataset: feature matrix has " +
                     std::to_string(columns_.size()) + " cells, expected " +
                     std::to_string(targets_.size() * feature_names_.size()));
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& name : feature_names_) {
    if (!seen.insert(name).second) {
      throw FormatError("dataset: duplicate fingerprint name '" + name + "'");
    }
  }
  for (std::size_t j = 0; j < feature_names_.size(); ++j) {
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      if (at(i, j) > 1) {
        throw FormatError("dataset: non-binary value at row " +
                          std::to_string(i) + ", column '" + feature_names_[j] +
                          "'");
      }
    }
  }
}

Dataset Dataset::from_rows(std::vector<std::string> ids,
                           std::vector<std::string> feature_names,
                           const std::vector<std::vector<std::uint8_t>>& rows,
                           std::vector<double> targets) {
  const std::size_t n = rows.size();
  const std::size_t f = feature_names.size();
  std::vector<std::uint8_t> columns(n * f);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != f) {
      throw ShapeError("dataset: row " + std::to_string(i) + " has " +
                       std::to_string(rows[i].size()) + " values, expected " +
                       std::to_string(f));
    }
    for (std::size_t j = 0; j < f; ++j) columns[j * n + i] = rows[i][j];
  }
  return Dataset(std::move(ids), std::move(feature_names), std::move(columns),
                 std::move(targets));
}

std::size_t Dataset::column_index(std::string_view name) const {
  const auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) {
    throw RangeError("dataset: no fingerprint named '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - feature_names_.begin());
}

bool Dataset::is_augmented() const noexcept {
  return std::any_of(feature_names_.begin(), feature_names_.end(),
                     [](const std::string& n) {
                       return n.starts_with(kComplementPrefix);
                     });
}

Dataset parse_dataset(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) {
    throw FormatError(where(source, line_no) + ": missing header row");
  }
  const auto header = split_fields(line);
  if (header.size() < 2 || trim(header[0]) != "id") {
    throw FormatError(where(source, line_no) + ": first column must be 'id'");
  }
  if (trim(header[1]) != "target") {
    throw FormatError(where(source, line_no) +
                      ": missing 'target' column (expected as second column)");
  }
  std::vector<std::string> names;
  for (std::size_t k = 2; k < header.size(); ++k) {
    names.emplace_back(trim(header[k]));
    if (names.back().empty()) {
      throw FormatError(where(source, line_no) + ": empty fingerprint name in column " +
                        std::to_string(k));
    }
  }
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) {
        throw FormatError(where(source, line_no) + ": duplicate fingerprint name '" +
                          n + "'");
      }
    }
  }

  std::vector<std::string> ids;
  std::vector<double> targets;
  std::vector<std::vector<std::uint8_t>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw FormatError(where(source, line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    ids.emplace_back(trim(fields[0]));
    const auto tfield = trim(fields[1]);
    double t = 0.0;
    const auto [ptr, ec] =
        std::from_chars(tfield.data(), tfield.data() + tfield.size(), t);
    if (ec != std::errc() || ptr != tfield.data() + tfield.size()) {
      throw FormatError(where(source, line_no) + ": target '" +
                        std::string(tfield) + "' is not a decimal number");
    }
    targets.push_back(t);
    std::vector<std::uint8_t> row(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto cell = trim(fields[j + 2]);
      if (cell == "0") {
        row[j] = 0;
      } else if (cell == "1") {
        row[j] = 1;
      } else {
        throw FormatError(where(source, line_no) + ": non-binary value '" +
                          std::string(cell) + "' in row " +
                          std::to_string(rows.size()) + ", column '" + names[j] +
                          "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return Dataset::from_rows(std::move(ids), std::move(names), rows,
                            std::move(targets));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, path.string());
}

void write_dataset(const Dataset& d, std::ostream& out) {
  out << "id,target";
  for (const auto& n : d.feature_names()) out << ',' << n;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < d.n_samples(); ++i) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d.targets()[i]);
    out << d.ids()[i] << ',' << std::string_view(buf, end - buf);
    for (std::size_t j = 0; j < d.n_fingerprints(); ++j) {
      out << ',' << static_cast<int>(d.at(i, j));
    }
    out << '\n';
  }
}

Dataset augment_complements(const Dataset& d) {
  if (d.is_augmented()) {
    throw AugmentError("dataset already contains complement columns (prefix '" +
                       std::string(kComplementPrefix) + "')");
  }
  const std::size_t n = d.n_samples();
  const std::size_t f = d.n_fingerprints();
  std::vector<std::string> names = d.feature_names();
  names.reserve(2 * f);
  std::vector<std::uint8_t> columns(2 * f * n);
  for (std::size_t j = 0; j < f; ++j) {
    names.push_back(std::string(kComplementPrefix) + d.feature_names()[j]);
    const auto col = d.column(j);
    std::copy(col.begin(), col.end(), columns.begin() + j * n);
    std::transform(col.begin(), col.end(), columns.begin() + (f + j) * n,
                   [](std::uint8_t x) { return static_cast<std::uint8_t>(1 - x); });
  }
  return Dataset(d.ids(), std::move(names), std::move(columns),
                 std::vector<double>(d.targets().begin(), d.targets().end()));
}

Dataset subsample(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n < 1 || n > d.n_samples()) {
    throw RangeError("subsample: n=" + std::to_string(n) + " outside [1, " +
                     std::to_string(d.n_samples()) + "]");
  }
  std::vector<std::size_t> order(d.n_samples());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(n);
  std::sort(order.begin(), order.end());

  std::vector<std::string> ids;
  std::vector<double> targets;
  ids.reserve(n);
  targets.reserve(n);
  for (auto i : order) {
    ids.push_back(d.ids()[i]);
    targets.push_back(d.targets()[i]);
  }
  std::vector<std::uint8_t> columns(n * d.n_fingerprints());
  for (std::size_t j = 0; j < d.n_fingerprints(); ++j) {
    const auto col = d.column(j);
    for (std::size_t k = 0; k < n; ++k) columns[j * n + k] = col[order[k]];
  }
  return Dataset(std::move(ids), d.feature_names(), std::move(columns),
                 std::move(targets));
}

Dataset center_targets(const Dataset& d) {
  std::vector<double> t(d.targets().begin(), d.targets().end());
  if (!t.empty()) {
    const double mean = std::accumulate(t.begin(), t.end(), 0.0) /
                        static_cast<double>(t.size());
    for (auto& v : t) v -= mean;
  }
  std::vector<std::uint8_t> columns;
  columns.reserve(d.n_samples() * d.n_fingerprints());
  for (std::size_t j = 0; j < d.n_fingerprints(); ++j) {
    const auto col = d.column(j);
    columns.insert(columns.end(), col.begin(), col.end());
  }
  return Dataset(d.ids(), d.feature_names(), std::move(columns), std::move(t));
}

}  // namespace qubofp
