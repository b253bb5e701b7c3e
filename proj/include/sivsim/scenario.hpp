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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sivsim {

/// Output directory or input file problems.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed, schema-checked scenario file.
///
/// Every field of the schema has a value (explicit or default), addressed
/// as "section.key" (top-level keys have no section). Numeric fields that
/// accept presets keep the preset name; number() resolves it.
class Scenario {
 public:
  static Scenario load_file(const std::filesystem::path& path);
  static Scenario load_string(std::string_view text, const std::filesystem::path& base_dir = {});

  const std::string& experiment() const { return text("experiment"); }
  /// Experiment actually executed: the sweep base for sweep scenarios.
  std::string target_experiment() const;

  double number(std::string_view key) const;
  long long integer(std::string_view key) const;
  bool flag(std::string_view key) const;
  const std::string& text(std::string_view key) const;
  const std::vector<double>& numbers(std::string_view key) const;
  /// Preset name if the field holds one.
  std::optional<std::string> preset(std::string_view key) const;
  /// Line of the field in the source file, or -1 for defaults.
  int line(std::string_view key) const;

  /// Replace a numeric field (sweeps, CLI overrides). Throws SchemaError
  /// for unknown or non-numeric keys and for values the validator rejects.
  void set_number(std::string_view key, double value);

  const std::filesystem::path& base_dir() const { return base_dir_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  /// Sections that apply to the executed experiment, in output order.
  std::vector<std::string> active_sections() const;

  struct Field {
    enum class Kind { kNumber, kInteger, kBool, kString, kChoice, kNumberOrPreset, kNumberList };
    Kind kind;
    double number = 0.0;
    long long integer = 0;
    bool flag = false;
    std::string text;  // strings, choices, preset names
    std::vector<double> list;
    int line = -1;
  };
  const std::map<std::string, Field>& fields() const { return fields_; }

 private:
  Scenario() = default;
  const Field& field(std::string_view key) const;

  std::map<std::string, Field> fields_;
  std::map<std::string, std::string> metadata_;
  std::filesystem::path base_dir_;
};

/// Schema documentation: one entry per field.
struct FieldInfo {
  std::string key;
  std::string kind;
  std::string default_value;
  std::string constraint;
};
std::vector<FieldInfo> scenario_schema();

/// Value of a named preset for a field, e.g. ("pump.rabi_per_ns", "reference").
std::optional<double> preset_value(std::string_view key, std::string_view name);

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

struct RunOutput {
  std::string experiment;
  std::string csv_name;
  std::string csv;
  std::string summary;  // JSON, schema "sivsim.summary/1"
  bool flagged = false;
};

inline constexpr std::string_view kSummarySchema = "sivsim.summary/1";

/// Run the scenario's experiment. Sweep scenarios run their sweep section.
RunOutput run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// One run per value of `parameter`; rows are computed independently (in
/// parallel across options.threads) and emitted in input order. Missing
/// arguments fall back to the scenario's sweep section.
RunOutput run_sweep(const Scenario& scenario, std::optional<std::string> parameter,
                    std::optional<std::vector<double>> values, const RunOptions& options = {});

/// Write `<csv_name>` and summary.json into `dir`, creating it if needed.
void write_output(const RunOutput& output, const std::filesystem::path& dir);

}  // namespace sivsim
