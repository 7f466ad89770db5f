// Copyright 2026 The qudmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qudmix {

/// Base of every error thrown by the library. The CLI maps subclasses to
/// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// Tomography needs a complete set of mutually unbiased bases, which this
/// library only builds for prime dimensions.
class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class IncompleteData : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, int iterations)
      : Error(what + " (iteration limit " + std::to_string(iterations) + ")"), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

/// A computed object broke a physical invariant (trace, Hermiticity,
/// positivity) by more than the configured tolerance.
class NumericalInvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace qudmix
