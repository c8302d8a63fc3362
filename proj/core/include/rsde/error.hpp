// Copyright 2026 The rsde Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace rsde {

// Base for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument violates an operation precondition (dimension mismatch, k < 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Geometric failure: point not on the boundary, empty normal cone,
// projection that did not converge.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Numerical failure during a simulation or solve (CFL violation,
// non-finite values, infeasible transport problem).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Configuration document failed to parse or validate. `field` is the
// dotted JSON path of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace rsde
