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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qubofp {

/// Prefix given to materialized complement columns.
inline constexpr std::string_view kComplementPrefix = "NOT_";

/// Binary fingerprint matrix with one real-valued regression target per row.
///
/// Storage is column-major: each fingerprint column is a contiguous run of
/// n_samples() bytes holding 0 or 1. A Dataset is immutable once
/// constructed and may be shared freely between threads.
class Dataset {
 public:
  Dataset() = default;

  /// Validates shapes, binary entries and name uniqueness; throws
  /// FormatError or ShapeError on violation.
  Dataset(std::vector<std::string> ids, std::vector<std::string> feature_names,
          std::vector<std::uint8_t> columns, std::vector<double> targets);

  /// Builds a dataset from row-major rows (rows[i][j] = X_{i,j}).
  static Dataset from_rows(std::vector<std::string> ids,
                           std::vector<std::string> feature_names,
                           const std::vector<std::vector<std::uint8_t>>& rows,
                           std::vector<double> targets);

  std::size_t n_samples() const noexcept { return targets_.size(); }
  std::size_t n_fingerprints() const noexcept { return feature_names_.size(); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<std::string>& feature_names() const noexcept {
    return feature_names_;
  }
  std::span<const double> targets() const noexcept { return targets_; }

  std::span<const std::uint8_t> column(std::size_t j) const noexcept {
    return {columns_.data() + j * n_samples(), n_samples()};
  }
  std::uint8_t at(std::size_t i, std::size_t j) const noexcept {
    return columns_[j * n_samples() + i];
  }

  /// Index of the column named `name`; throws RangeError if absent.
  std::size_t column_index(std::string_view name) const;

  bool is_augmented() const noexcept;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> feature_names_;
  std::vector<std::uint8_t> columns_;
  std::vector<double> targets_;
};

/// Reads the dataset CSV: header `id,target,<fp>...`, literal 0/1 cells.
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::istream& in, std::string_view source = "<stream>");

/// Writes `d` in the same CSV layout load_dataset accepts.
void write_dataset(const Dataset& d, std::ostream& out);

/// Appends a NOT_<name> column holding 1 - X for every column. Throws
/// AugmentError if any column already carries the complement prefix.
Dataset augment_complements(const Dataset& d);

/// Draws n rows without replacement via a seeded shuffle. Output rows keep
/// their original relative order. Throws RangeError unless 1 <= n <= N_S.
Dataset subsample(const Dataset& d, std::size_t n, std::uint64_t seed);

/// Returns a copy with targets shifted to zero mean.
Dataset center_targets(const Dataset& d);

}  // namespace qubofp
