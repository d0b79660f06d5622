// Copyright 2026 The gridvolt Authors
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

#ifndef GRIDVOLT_COMMON_HPP
#define GRIDVOLT_COMMON_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gv {

using cdouble = std::complex<double>;

/// Base class for all gridvolt errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input file or schema violation; message names the offending field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (singular matrix, degenerate linearization, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Power flow did not converge or collapsed.
class PowerFlowError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / IO failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gv

#endif  // GRIDVOLT_COMMON_HPP
