// Copyright 2026 The sivsim Authors
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

namespace sivsim {

/// Raised when an integration cannot continue: step-size underflow or a
/// density-matrix invariant violated beyond tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_valid_time_ns)
      : std::runtime_error(what), last_valid_time_ns_(last_valid_time_ns) {}

  double last_valid_time_ns() const noexcept { return last_valid_time_ns_; }

 private:
  double last_valid_time_ns_;
};

/// Scenario file problems: unknown keys, bad values, missing sections.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, int line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        detail_(what) {}

  int line() const noexcept { return line_; }
  /// Message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  int line_;
  std::string detail_;
};

}  // namespace sivsim
