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

#include <stdexcept>
#include <string>

namespace qubofp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset input (bad header, non-binary cell, duplicate name).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Complement augmentation applied to an already augmented dataset.
class AugmentError : public Error {
 public:
  using Error::Error;
};

/// A count or parameter is outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Vector lengths that must agree do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A fingerprint set with no selected column where one is required.
class EmptySelectionError : public Error {
 public:
  using Error::Error;
};

/// The statistic is undefined for the given input (e.g. zero samples).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration requested on a model that is too large.
class TooLargeError : public Error {
 public:
  using Error::Error;
};

/// Full search would exceed the configured candidate budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qubofp
