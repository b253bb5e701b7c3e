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

#include "sivsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "sivsim/ensemble.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/experiments.hpp"
#include "sivsim/fwm.hpp"
#include "sivsim/presets.hpp"
#include "sivsim/units.hpp"

namespace sivsim {
namespace {

using Json = nlohmann::ordered_json;
using Kind = Scenario::Field::Kind;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Schema

struct Range {
  double lo = -kInf, hi = kInf;
  bool lo_open = false, hi_open = false;

  bool contains(double v) const {
    if (!std::isfinite(v)) return false;
    if (lo_open ? !(v > lo) : !(v >= lo)) return false;
    if (hi_open ? !(v < hi) : !(v <= hi)) return false;
    return true;
  }
  std::string describe() const {
    std::ostringstream os;
    if (lo == -kInf && hi == kInf) return "finite";
    if (hi == kInf) {
      os << (lo_open ? "> " : ">= ") << lo;
    } else if (lo == -kInf) {
      os << (hi_open ? "< " : "<= ") << hi;
    } else {
      os << "in " << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    }
    return os.str();
  }
};

const Range kAny{};
const Range kPositive{0.0, kInf, true, false};
const Range kNonNegative{0.0, kInf, false, false};

struct Spec {
  std::string key;
  Kind kind;
  double number = 0.0;       // default for numeric kinds, 0/1 for bool
  std::string text;          // default for strings, choices, presets
  Range range{};
  std::vector<std::string> choices;  // choices, or preset names
  bool required = false;
};

Spec num(std::string key, double def, Range r = kAny) { return {std::move(key), Kind::kNumber, def, {}, r, {}}; }
Spec integer(std::string key, long long def, Range r) {
  return {std::move(key), Kind::kInteger, static_cast<double>(def), {}, r, {}};
}
Spec boolean(std::string key, bool def) { return {std::move(key), Kind::kBool, def ? 1.0 : 0.0, {}, kAny, {}}; }
Spec str(std::string key, std::string def) { return {std::move(key), Kind::kString, 0.0, std::move(def), kAny, {}}; }
Spec choice(std::string key, std::string def, std::vector<std::string> options) {
  return {std::move(key), Kind::kChoice, 0.0, std::move(def), kAny, std::move(options)};
}
Spec preset_or_number(std::string key, std::string def, std::vector<std::string> names, Range r) {
  return {std::move(key), Kind::kNumberOrPreset, 0.0, std::move(def), r, std::move(names)};
}
Spec number_list(std::string key) { return {std::move(key), Kind::kNumberList, 0.0, {}, kAny, {}}; }

const std::vector<std::string> kExperiments = {"ramsey", "echo", "pump", "stirap", "fwm", "spectrum-fit", "sweep"};
const std::vector<std::string> kSections = {"system", "ensemble", "solver", "metadata", "ramsey", "echo",
                                            "pump",   "stirap",   "fwm",    "spectrum-fit", "sweep"};

std::vector<Spec> coherence_specs(const std::string& s, double eid, double tau_start, double tau_stop) {
  std::vector<Spec> v = {
      choice(s + ".transition", "C", {"A", "B", "C", "D"}),
      num(s + ".pulse_fwhm_ns", 0.012, kPositive),
      num(s + ".pulse_detuning_ghz", 0.0),
      num(s + ".half_pi_area_rad", kPi / 2.0, kNonNegative),
      num(s + ".eid_ghz", eid, kNonNegative),
      num(s + ".tau_start_ns", tau_start, kPositive),
      num(s + ".tau_stop_ns", tau_stop, kPositive),
      integer(s + ".tau_points", 20, {2.0, 10000.0}),
      choice(s + ".fit_model", "gaussian-times-exponential",
             {"gaussian-decay", "exponential-decay", "gaussian-times-exponential"}),
      choice(s + ".initial_state", "thermal", {"thermal", "ground"}),
  };
  if (s == "echo") v.push_back(num(s + ".pi_area_rad", kPi, kNonNegative));
  return v;
}

const std::vector<Spec>& schema() {
  static const std::vector<Spec> specs = [] {
    std::vector<Spec> v = {
        choice("experiment", "", kExperiments),
        integer("seed", 0, {0.0, 9.2e18}),
        str("output_dir", ""),

        num("system.ground_splitting_ghz", 48.0, kPositive),
        num("system.excited_splitting_ghz", 259.0, kPositive),
        num("system.excited_lifetime_ns", 1.7, kPositive),
        num("system.orbital_t1_ns", 27.0, kPositive),
        num("system.temperature_k", 5.0, kPositive),
        num("system.excited_pure_dephasing_per_ns", 0.0, kNonNegative),
        num("system.ground_pure_dephasing_per_ns", 0.0, kNonNegative),
        num("system.excited_orbital_relaxation_per_ns", 0.0, kNonNegative),
        boolean("system.decoherence", true),

        num("ensemble.fwhm_ghz", 10.0, kPositive),
        integer("ensemble.n_emitters", 10, {1.0, 100000.0}),
        choice("ensemble.method", "gauss-hermite", {"gauss-hermite", "uniform-grid", "monte-carlo"}),

        num("solver.tol", 1e-9, {1e-12, 1e-4}),
        num("solver.max_step_ns", 0.0, kNonNegative),
        num("solver.fixed_step_ns", 0.0, kNonNegative),

        choice("pump.transition", "D", {"A", "B", "C", "D"}),
        preset_or_number("pump.rabi_per_ns", "reference", {"reference"}, kNonNegative),
        num("pump.duration_ns", 100.0, kPositive),
        num("pump.readout_delay_ns", 6.0, kNonNegative),
        num("pump.detuning_ghz", 0.0),
        integer("pump.trace_samples", 201, {2.0, 1e6}),

        preset_or_number("stirap.pump_rabi_per_ns", "reference", {"reference"}, kNonNegative),
        num("stirap.pump_duration_ns", 100.0, kPositive),
        num("stirap.readout_delay_ns", 6.0, kNonNegative),
        num("stirap.common_detuning_ghz", presets::kRamanDetuningGhz),
        num("stirap.two_photon_detuning_ghz", 0.0),
        num("stirap.relative_delay_ns", 0.0),
        preset_or_number("stirap.signal_area_rad", "reference", {"reference", "ideal"}, kNonNegative),
        preset_or_number("stirap.control_area_rad", "reference", {"reference", "ideal"}, kNonNegative),
        num("stirap.raman_fwhm_ns", presets::kRamanFwhmNs, kPositive),
        num("stirap.signal_phase_rad", 0.0),
        num("stirap.control_phase_rad", 0.0),
        boolean("stirap.coherent_raman", false),
        integer("stirap.trace_samples", 101, {2.0, 1e6}),

        preset_or_number("fwm.control_rabi_per_ns", "reference", {"reference"}, kNonNegative),
        num("fwm.common_detuning_ghz", presets::kRamanDetuningGhz),
        preset_or_number("fwm.optical_depth", "reference", {"reference"}, kNonNegative),
        choice("fwm.stokes_anchor", "upper-excited", {"upper-excited", "lower-excited"}),
        num("fwm.spin_wave_decay_per_ns", presets::kFwmSpinWaveDecayPerNs, kNonNegative),
        num("fwm.two_photon_detuning_ghz", 0.0),
        boolean("fwm.light_shift_compensated", true),
        num("fwm.rho22_pumped", 0.19, {0.0, 1.0}),
        num("fwm.inversion_delay_ns", 6.0, kNonNegative),
        preset_or_number("fwm.stokes_ratio", "reference", {"reference", "calibrate"}, kNonNegative),
        num("fwm.stokes_phase_rad", 0.0),
        num("fwm.seed_fwhm_ns", 2.0, kPositive),
        num("fwm.seed_window_ns", 8.0, kPositive),
        integer("fwm.time_samples", 1601, {2.0, 1e7}),
        integer("fwm.z_slabs", 32, {1.0, 1e5}),
        integer("fwm.phase_points", 32, {1.0, 1e5}),

        str("spectrum-fit.input_csv", ""),
        integer("spectrum-fit.n_lines", 12, {1.0, 1000.0}),
        num("spectrum-fit.line_fwhm_ghz", 10.0, kPositive),
        num("spectrum-fit.f_min_ghz", -120.0),
        num("spectrum-fit.f_max_ghz", 500.0),
        integer("spectrum-fit.points", 1241, {3.0, 1e7}),
        num("spectrum-fit.noise", 0.01, kNonNegative),

        choice("sweep.base", "", {"ramsey", "echo", "pump", "stirap", "fwm", "spectrum-fit"}),
        str("sweep.parameter", ""),
        number_list("sweep.values"),
    };
    v.front().required = true;
    for (auto& s : coherence_specs("ramsey", presets::kRamseyEidGhz, 0.025, 0.12)) v.push_back(s);
    for (auto& s : coherence_specs("echo", presets::kEchoEidGhz, 0.03, 0.4)) v.push_back(s);
    return v;
  }();
  return specs;
}

const Spec* find_spec(std::string_view key) {
  for (const auto& s : schema())
    if (s.key == key) return &s;
  return nullptr;
}

std::string section_of(const std::string& key) {
  const auto dot = key.find('.');
  return dot == std::string::npos ? std::string() : key.substr(0, dot);
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::kNumber: return "number";
    case Kind::kInteger: return "integer";
    case Kind::kBool: return "bool";
    case Kind::kString: return "string";
    case Kind::kChoice: return "choice";
    case Kind::kNumberOrPreset: return "number or preset";
    case Kind::kNumberList: return "number list";
  }
  return "?";
}

bool is_numeric(Kind k) { return k == Kind::kNumber || k == Kind::kInteger || k == Kind::kNumberOrPreset; }

Scenario::Field default_field(const Spec& s) {
  Scenario::Field f;
  f.kind = s.kind;
  f.number = s.number;
  f.integer = static_cast<long long>(s.number);
  f.flag = s.number != 0.0;
  f.text = s.text;
  return f;
}

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : -1; }

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

void assign(Scenario::Field& f, const Spec& spec, const YAML::Node& node) {
  const int line = line_of(node);
  const std::string& key = spec.key;
  f.line = line;
  if (spec.kind == Kind::kNumberList) {
    if (!node.IsSequence()) throw SchemaError("'" + key + "' must be a list of numbers", line);
    f.list.clear();
    for (const auto& item : node) {
      const auto v = item.IsScalar() ? parse_double(item.Scalar()) : std::nullopt;
      if (!v || !std::isfinite(*v)) throw SchemaError("'" + key + "' entries must be finite numbers", line_of(item));
      f.list.push_back(*v);
    }
    return;
  }
  if (!node.IsScalar()) throw SchemaError("'" + key + "' must be a scalar (" + kind_name(spec.kind) + ")", line);
  const std::string& raw = node.Scalar();
  switch (spec.kind) {
    case Kind::kNumber:
    case Kind::kNumberOrPreset: {
      if (const auto v = parse_double(raw)) {
        if (!spec.range.contains(*v))
          throw SchemaError("'" + key + "' = " + raw + " must be " + spec.range.describe(), line);
        f.number = *v;
        f.text.clear();
        return;
      }
      if (spec.kind == Kind::kNumberOrPreset &&
          std::find(spec.choices.begin(), spec.choices.end(), raw) != spec.choices.end()) {
        f.text = raw;
        return;
      }
      std::string msg = "'" + key + "' must be a number";
      if (spec.kind == Kind::kNumberOrPreset) msg += " or one of the presets: " + join(spec.choices);
      throw SchemaError(msg + " (got '" + raw + "')", line);
    }
    case Kind::kInteger: {
      const auto v = parse_double(raw);
      if (!v || std::floor(*v) != *v) throw SchemaError("'" + key + "' must be an integer (got '" + raw + "')", line);
      if (!spec.range.contains(*v)) throw SchemaError("'" + key + "' = " + raw + " must be " + spec.range.describe(), line);
      f.integer = static_cast<long long>(*v);
      f.number = *v;
      return;
    }
    case Kind::kBool: {
      if (raw == "true") f.flag = true;
      else if (raw == "false") f.flag = false;
      else throw SchemaError("'" + key + "' must be true or false (got '" + raw + "')", line);
      return;
    }
    case Kind::kString:
      f.text = raw;
      return;
    case Kind::kChoice:
      if (std::find(spec.choices.begin(), spec.choices.end(), raw) == spec.choices.end())
        throw SchemaError("'" + key + "' must be one of: " + join(spec.choices) + " (got '" + raw + "')", line);
      f.text = raw;
      return;
    case Kind::kNumberList:
      break;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario

Scenario Scenario::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_string(buf.str(), path.parent_path());
}

Scenario Scenario::load_string(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw SchemaError("malformed scenario: " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
  }
  if (!root || root.IsNull()) throw SchemaError("scenario is empty");
  if (!root.IsMap()) throw SchemaError("scenario must be a mapping of sections", line_of(root));

  Scenario sc;
  sc.base_dir_ = base_dir;
  for (const auto& spec : schema()) sc.fields_.emplace(spec.key, default_field(spec));

  std::map<std::string, int> seen_sections;
  std::set<std::string> seen_keys;
  for (const auto& entry : root) {
    const std::string name = entry.first.as<std::string>();
    const int line = line_of(entry.first);
    const bool is_section = std::find(kSections.begin(), kSections.end(), name) != kSections.end();
    if (!seen_keys.insert(name).second) throw SchemaError("duplicate key '" + name + "'", line);
    if (!is_section) {
      const Spec* spec = find_spec(name);
      if (!spec) throw SchemaError("unknown key '" + name + "'", line);
      assign(sc.fields_.at(name), *spec, entry.second);
      continue;
    }
    seen_sections[name] = line;
    if (entry.second.IsNull()) continue;
    if (!entry.second.IsMap()) throw SchemaError("section '" + name + "' must be a mapping", line);
    for (const auto& kv : entry.second) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_keys.insert(name + "." + key).second)
        throw SchemaError("duplicate key '" + key + "' in section '" + name + "'", line_of(kv.first));
      if (name == "metadata") {
        if (!kv.second.IsScalar()) throw SchemaError("metadata values must be scalars", line_of(kv.first));
        sc.metadata_[key] = kv.second.Scalar();
        continue;
      }
      const std::string full = name + "." + key;
      const Spec* spec = find_spec(full);
      if (!spec) throw SchemaError("unknown key '" + key + "' in section '" + name + "'", line_of(kv.first));
      assign(sc.fields_.at(full), *spec, kv.second);
    }
  }

  if (sc.fields_.at("experiment").line < 0) throw SchemaError("missing required key 'experiment'");
  const std::string target = sc.target_experiment();
  if (sc.experiment() == "sweep" && target.empty())
    throw SchemaError("sweep scenarios need 'sweep.base'", sc.line("experiment"));

  // Only the sections of the executed experiment may appear.
  const auto active = sc.active_sections();
  for (const auto& [s, line] : seen_sections) {
    if (s == "metadata") continue;
    if (std::find(active.begin(), active.end(), s) == active.end())
      throw SchemaError("section '" + s + "' does not apply to experiment '" + sc.experiment() + "'", line);
  }

  auto require_order = [&](const std::string& lo, const std::string& hi) {
    if (!(sc.number(hi) > sc.number(lo)))
      throw SchemaError("'" + hi + "' must be greater than '" + lo + "'", sc.line(hi) >= 0 ? sc.line(hi) : sc.line(lo));
  };
  if (target == "ramsey" || target == "echo") require_order(target + ".tau_start_ns", target + ".tau_stop_ns");
  if (target == "spectrum-fit") require_order("spectrum-fit.f_min_ghz", "spectrum-fit.f_max_ghz");
  if (target == "fwm" && !(sc.number("fwm.common_detuning_ghz") != 0.0))
    throw SchemaError("'fwm.common_detuning_ghz' must be nonzero", sc.line("fwm.common_detuning_ghz"));
  if (sc.text("ensemble.method") == "gauss-hermite" && sc.integer("ensemble.n_emitters") > EnsembleSpec::kMaxGaussHermiteNodes)
    throw SchemaError("gauss-hermite quadrature is limited to 64 nodes", sc.line("ensemble.n_emitters"));
  return sc;
}

std::string Scenario::target_experiment() const {
  return experiment() == "sweep" ? text("sweep.base") : experiment();
}

std::vector<std::string> Scenario::active_sections() const {
  std::vector<std::string> out = {"system", "ensemble", "solver"};
  const std::string target = target_experiment();
  if (!target.empty()) out.push_back(target);
  if (experiment() == "sweep") out.push_back("sweep");
  return out;
}

const Scenario::Field& Scenario::field(std::string_view key) const {
  const auto it = fields_.find(std::string(key));
  if (it == fields_.end()) throw SchemaError("unknown scenario field '" + std::string(key) + "'");
  return it->second;
}

double Scenario::number(std::string_view key) const {
  const Field& f = field(key);
  if (f.kind == Kind::kInteger) return static_cast<double>(f.integer);
  if (f.kind == Kind::kNumberOrPreset && !f.text.empty()) {
    if (const auto v = preset_value(key, f.text)) return *v;
    throw SchemaError("preset '" + f.text + "' of '" + std::string(key) + "' has no fixed value", f.line);
  }
  if (!is_numeric(f.kind)) throw SchemaError("'" + std::string(key) + "' is not numeric");
  return f.number;
}

long long Scenario::integer(std::string_view key) const {
  const Field& f = field(key);
  if (f.kind != Kind::kInteger) throw SchemaError("'" + std::string(key) + "' is not an integer field");
  return f.integer;
}

bool Scenario::flag(std::string_view key) const { return field(key).flag; }
const std::string& Scenario::text(std::string_view key) const { return field(key).text; }
const std::vector<double>& Scenario::numbers(std::string_view key) const { return field(key).list; }
int Scenario::line(std::string_view key) const { return field(key).line; }

std::optional<std::string> Scenario::preset(std::string_view key) const {
  const Field& f = field(key);
  if (f.kind == Kind::kNumberOrPreset && !f.text.empty()) return f.text;
  return std::nullopt;
}

void Scenario::set_number(std::string_view key, double value) {
  const Spec* spec = find_spec(key);
  if (!spec) throw SchemaError("unknown scenario field '" + std::string(key) + "'");
  if (!is_numeric(spec->kind))
    throw SchemaError("'" + std::string(key) + "' is a " + kind_name(spec->kind) + " field, not a numeric scalar");
  std::ostringstream os;
  os.precision(17);
  os << value;
  YAML::Node node(os.str());
  Field& f = fields_.at(std::string(key));
  const int line = f.line;
  assign(f, *spec, node);
  f.line = line;
}

std::vector<FieldInfo> scenario_schema() {
  std::vector<FieldInfo> out;
  for (const auto& s : schema()) {
    FieldInfo info{s.key, kind_name(s.kind), {}, {}};
    std::ostringstream def;
    switch (s.kind) {
      case Kind::kNumber: def << s.number; info.constraint = s.range.describe(); break;
      case Kind::kInteger: def << static_cast<long long>(s.number); info.constraint = s.range.describe(); break;
      case Kind::kBool: def << (s.number != 0.0 ? "true" : "false"); break;
      case Kind::kString: def << s.text; break;
      case Kind::kChoice: def << s.text; info.constraint = "one of: " + join(s.choices); break;
      case Kind::kNumberOrPreset:
        def << s.text;
        info.constraint = s.range.describe() + " or preset: " + join(s.choices);
        break;
      case Kind::kNumberList: info.constraint = "list of numbers"; break;
    }
    info.default_value = s.required ? "(required)" : def.str();
    out.push_back(info);
  }
  return out;
}

std::optional<double> preset_value(std::string_view key, std::string_view name) {
  if (name == "reference") {
    if (key == "pump.rabi_per_ns" || key == "stirap.pump_rabi_per_ns") return presets::kPumpRabiPerNs;
    if (key == "stirap.signal_area_rad" || key == "stirap.control_area_rad") return presets::kRamanAreaReference;
    if (key == "fwm.control_rabi_per_ns") return presets::kFwmControlRabiPerNs;
    if (key == "fwm.optical_depth") return presets::kFwmOpticalDepth;
    if (key == "fwm.stokes_ratio") return presets::kFwmStokesRatio;
  }
  if (name == "ideal" && (key == "stirap.signal_area_rad" || key == "stirap.control_area_rad"))
    return presets::kRamanAreaIdeal;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Runs

namespace {

struct Outcome {
  Json results = Json::object();
  std::string csv_name;
  std::string csv;
  std::vector<std::string> flags;
  std::vector<std::string> warnings;
};

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ += (i ? "," : "") + header[i];
    out_ += '\n';
  }
  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("CSV row width mismatch");
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::isnan(values[i])) {
        std::snprintf(buf, sizeof buf, "nan");
      } else {
        std::snprintf(buf, sizeof buf, "%.12g", values[i]);
      }
      out_ += (i ? "," : "");
      out_ += buf;
    }
    out_ += '\n';
  }
  std::string str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

LevelSystem make_system(const Scenario& sc) {
  RateDefaults d;
  d.excited_lifetime_ns = sc.number("system.excited_lifetime_ns");
  d.orbital_t1_ns = sc.number("system.orbital_t1_ns");
  d.temperature_k = sc.number("system.temperature_k");
  d.excited_pure_dephasing_per_ns = sc.number("system.excited_pure_dephasing_per_ns");
  d.ground_pure_dephasing_per_ns = sc.number("system.ground_pure_dephasing_per_ns");
  d.excited_orbital_relaxation_per_ns = sc.number("system.excited_orbital_relaxation_per_ns");
  auto sys = LevelSystem::siv(d, sc.number("system.ground_splitting_ghz"), sc.number("system.excited_splitting_ghz"));
  return sc.flag("system.decoherence") ? sys : sys.without_decoherence();
}

EnsembleSpec make_ensemble(const Scenario& sc, std::uint64_t seed) {
  EnsembleSpec e;
  e.fwhm_ghz = sc.number("ensemble.fwhm_ghz");
  e.n_emitters = static_cast<int>(sc.integer("ensemble.n_emitters"));
  e.method = sampling_method_from_string(sc.text("ensemble.method"));
  e.seed = seed;
  e.validate();
  return e;
}

EvolveOptions make_evolve(const Scenario& sc, double tol) {
  EvolveOptions o;
  o.tol = tol;
  o.max_step_ns = sc.number("solver.max_step_ns");
  if (sc.number("solver.fixed_step_ns") > 0.0) {
    o.fixed_step = true;
    o.fixed_step_ns = sc.number("solver.fixed_step_ns");
  }
  return o;
}

struct Context {
  const Scenario& sc;
  LevelSystem system;
  EnsembleSpec ensemble;
  EvolveOptions evolve;
  int threads;
  std::uint64_t seed;
};

std::vector<double> linspace(double a, double b, long long n) {
  std::vector<double> v;
  for (long long i = 0; i < n; ++i) v.push_back(n > 1 ? a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1) : a);
  return v;
}

Outcome run_coherence(const Context& cx, const std::string& s) {
  const Scenario& sc = cx.sc;
  CoherenceScan scan;
  scan.ensemble = cx.ensemble;
  scan.pulses.transition = transition_from_string(sc.text(s + ".transition"));
  scan.pulses.fwhm_ns = sc.number(s + ".pulse_fwhm_ns");
  scan.pulses.detuning_ghz = sc.number(s + ".pulse_detuning_ghz");
  scan.pulses.half_pi_area_rad = sc.number(s + ".half_pi_area_rad");
  if (s == "echo") scan.pulses.pi_area_rad = sc.number("echo.pi_area_rad");
  scan.eid_ghz = sc.number(s + ".eid_ghz");
  scan.tau_ns = linspace(sc.number(s + ".tau_start_ns"), sc.number(s + ".tau_stop_ns"), sc.integer(s + ".tau_points"));
  scan.model = decay_model_from_string(sc.text(s + ".fit_model"));
  scan.temperature_k = sc.number("system.temperature_k");
  if (sc.text(s + ".initial_state") == "ground") scan.initial_state = pure_state(levels_of(scan.pulses.transition).ground);
  scan.evolve = cx.evolve;
  scan.threads = cx.threads;

  const auto r = s == "ramsey" ? run_ramsey(cx.system, scan) : run_hahn_echo(cx.system, scan);
  Outcome o;
  o.csv_name = s + ".csv";
  Csv csv({"tau_ns", "upper_population", "lower_population", "visibility", "fit_visibility"});
  for (std::size_t i = 0; i < r.tau_ns.size(); ++i)
    csv.row({r.tau_ns[i], r.upper[i], r.lower[i], r.visibility[i],
             r.fit.flagged ? std::numeric_limits<double>::quiet_NaN() : r.fit.evaluate(r.tau_ns[i])});
  o.csv = csv.str();
  const auto& f = r.fit;
  o.results[s == "ramsey" ? "t2_star_ns" : "t2_echo_ns"] = number_or_null(f.time_constant_ns);
  o.results["uncertainty_ns"] = number_or_null(f.uncertainty_ns);
  o.results["gaussian_time_ns"] = number_or_null(f.gaussian_rate > 0.0 ? 1.0 / std::sqrt(f.gaussian_rate) : kInf);
  o.results["exponential_time_ns"] = number_or_null(f.exponential_rate > 0.0 ? 1.0 / f.exponential_rate : kInf);
  o.results["amplitude"] = f.amplitude;
  o.results["residual_norm"] = number_or_null(f.residual_norm);
  o.results["fit_model"] = std::string(to_string(f.model));
  o.results["fit_flagged"] = f.flagged;
  if (r.flagged) o.flags.push_back(f.message.empty() ? "decay fit flagged" : "decay fit: " + f.message);
  for (const auto& w : r.warnings)
    if (w.rfind("decay fit", 0) != 0) o.warnings.push_back(w);
  return o;
}

Outcome run_pump(const Context& cx) {
  const Scenario& sc = cx.sc;
  PumpScan scan;
  scan.ensemble = cx.ensemble;
  scan.pump.transition = transition_from_string(sc.text("pump.transition"));
  scan.pump.rabi = sc.number("pump.rabi_per_ns");
  scan.pump.duration_ns = sc.number("pump.duration_ns");
  scan.pump.readout_delay_ns = sc.number("pump.readout_delay_ns");
  scan.pump.detuning_ghz = sc.number("pump.detuning_ghz");
  scan.temperature_k = sc.number("system.temperature_k");
  scan.trace_samples = static_cast<int>(sc.integer("pump.trace_samples"));
  scan.evolve = cx.evolve;
  scan.threads = cx.threads;
  const auto r = run_optical_pumping(cx.system, scan);

  Outcome o;
  o.csv_name = "pump.csv";
  Csv csv({"time_ns", "rho22", "fluorescence_per_ns"});
  for (std::size_t i = 0; i < r.times_ns.size(); ++i) csv.row({r.times_ns[i], r.rho22[i], r.fluorescence[i]});
  o.csv = csv.str();
  o.results["pump_rabi_per_ns"] = scan.pump.rabi;
  o.results["rho22_initial"] = r.rho22_initial;
  o.results["rho22_pump_end"] = r.rho22_pump_end;
  o.results["rho22_readout"] = r.rho22_readout;
  return o;
}

Outcome run_stirap_experiment(const Context& cx) {
  const Scenario& sc = cx.sc;
  StirapScan scan;
  scan.ensemble = cx.ensemble;
  scan.pump.rabi = sc.number("stirap.pump_rabi_per_ns");
  scan.pump.duration_ns = sc.number("stirap.pump_duration_ns");
  scan.pump.readout_delay_ns = sc.number("stirap.readout_delay_ns");
  scan.raman.common_detuning_ghz = sc.number("stirap.common_detuning_ghz");
  scan.raman.two_photon_detuning_ghz = sc.number("stirap.two_photon_detuning_ghz");
  scan.raman.relative_delay_ns = sc.number("stirap.relative_delay_ns");
  scan.raman.signal_area_rad = sc.number("stirap.signal_area_rad");
  scan.raman.control_area_rad = sc.number("stirap.control_area_rad");
  scan.raman.fwhm_ns = sc.number("stirap.raman_fwhm_ns");
  scan.raman.signal_phase_rad = sc.number("stirap.signal_phase_rad");
  scan.raman.control_phase_rad = sc.number("stirap.control_phase_rad");
  scan.coherent_raman = sc.flag("stirap.coherent_raman");
  scan.temperature_k = sc.number("system.temperature_k");
  scan.trace_samples = static_cast<int>(sc.integer("stirap.trace_samples"));
  scan.evolve = cx.evolve;
  scan.threads = cx.threads;
  const auto r = run_stirap(cx.system, scan);

  Outcome o;
  o.csv_name = "stirap.csv";
  Csv csv({"time_ns", "rho11", "rho22", "rho_excited"});
  for (std::size_t i = 0; i < r.times_ns.size(); ++i) csv.row({r.times_ns[i], r.rho11[i], r.rho22[i], r.rho_excited[i]});
  o.csv = csv.str();
  o.results["pump_rabi_per_ns"] = scan.pump.rabi;
  o.results["signal_area_rad"] = scan.raman.signal_area_rad;
  o.results["control_area_rad"] = scan.raman.control_area_rad;
  o.results["raman_start_ns"] = r.raman_start_ns;
  o.results["raman_stop_ns"] = r.raman_stop_ns;
  o.results["rho22_start"] = r.rho22_start;
  o.results["rho22_initial"] = r.rho22_initial;
  o.results["rho22_final"] = r.rho22_final;
  o.results["transfer_efficiency"] = r.efficiency;
  o.warnings = r.warnings;
  return o;
}

Outcome run_fwm_experiment(const Context& cx) {
  const Scenario& sc = cx.sc;
  const double delta = sc.number("fwm.common_detuning_ghz");
  FwmMedium m = adiabatic_couplings(sc.number("fwm.control_rabi_per_ns"), delta, cx.system,
                                    sc.number("fwm.optical_depth"),
                                    stokes_anchor_from_string(sc.text("fwm.stokes_anchor")));
  m.spin_wave_decay = sc.number("fwm.spin_wave_decay_per_ns");
  m.population_inversion =
      rethermalized_inversion(sc.number("fwm.rho22_pumped"), sc.number("fwm.inversion_delay_ns"),
                              sc.number("system.orbital_t1_ns"), sc.number("system.temperature_k"),
                              sc.number("system.ground_splitting_ghz"));
  m.two_photon_detuning_ghz = sc.number("fwm.two_photon_detuning_ghz");
  if (sc.flag("fwm.light_shift_compensated")) m.two_photon_detuning_ghz += m.stark_stokes_ghz - m.stark_signal_ghz;

  FwmPulseSeeds seeds;
  seeds.t_end_ns = sc.number("fwm.seed_window_ns");
  seeds.center_ns = 0.5 * seeds.t_end_ns;
  seeds.fwhm_ns = sc.number("fwm.seed_fwhm_ns");
  seeds.samples = static_cast<int>(sc.integer("fwm.time_samples"));
  FwmGridOptions grid;
  grid.nz = static_cast<int>(sc.integer("fwm.z_slabs"));
  const auto n_phase = sc.integer("fwm.phase_points");
  std::vector<double> phases;
  for (long long i = 0; i < n_phase; ++i) phases.push_back(kTwoPi * static_cast<double>(i) / static_cast<double>(n_phase));

  Outcome o;
  double ratio = 0.0;
  if (sc.preset("fwm.stokes_ratio") == std::optional<std::string>("calibrate")) {
    const auto cal = calibrate_stokes_ratio(m, seeds, phases, 3.0, grid);
    ratio = cal.stokes_ratio;
    o.results["calibration_margin"] = cal.margin;
  } else {
    ratio = sc.number("fwm.stokes_ratio");
  }
  seeds.stokes = std::polar(ratio, sc.number("fwm.stokes_phase_rad"));
  const auto pts = phase_response(m, seeds, phases, grid, cx.threads);

  o.csv_name = "fwm.csv";
  Csv csv({"phase_rad", "signal_gain", "stokes_gain"});
  std::size_t i_min = 0, i_max = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    csv.row({pts[i].phase_rad, pts[i].signal_gain, pts[i].stokes_gain});
    if (pts[i].signal_gain < pts[i_min].signal_gain) i_min = i;
    if (pts[i].signal_gain > pts[i_max].signal_gain) i_max = i;
  }
  o.csv = csv.str();
  o.results["coupling_signal"] = m.coupling_signal;
  o.results["coupling_stokes"] = m.coupling_stokes;
  o.results["stark_signal_ghz"] = m.stark_signal_ghz;
  o.results["stark_stokes_ghz"] = m.stark_stokes_ghz;
  o.results["two_photon_detuning_ghz"] = m.two_photon_detuning_ghz;
  o.results["population_inversion"] = m.population_inversion;
  o.results["stokes_ratio"] = ratio;
  o.results["min_gain"] = pts[i_min].signal_gain;
  o.results["min_gain_phase_rad"] = pts[i_min].phase_rad;
  o.results["stokes_gain_at_min"] = number_or_null(pts[i_min].stokes_gain);
  o.results["max_gain"] = pts[i_max].signal_gain;
  o.results["max_gain_phase_rad"] = pts[i_max].phase_rad;
  o.results["stokes_gain_at_max"] = number_or_null(pts[i_max].stokes_gain);
  if (auto w = adiabatic_warning(delta, cx.system)) o.warnings.push_back(*w);
  return o;
}

void read_spectrum_csv(const std::filesystem::path& path, std::vector<double>& f, std::vector<double>& y) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read spectrum file '" + path.string() + "'");
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    const auto a = comma == std::string::npos ? std::nullopt : parse_double(line.substr(0, comma));
    auto rest = comma == std::string::npos ? std::string() : line.substr(comma + 1);
    if (const auto c2 = rest.find(','); c2 != std::string::npos) rest = rest.substr(0, c2);
    while (!rest.empty() && (rest.back() == '\r' || rest.back() == ' ')) rest.pop_back();
    const auto b = parse_double(rest);
    if (!a || !b) {
      if (f.empty()) continue;  // header row
      throw SchemaError(path.string() + ": malformed spectrum row", n);
    }
    f.push_back(*a);
    y.push_back(*b);
  }
}

Outcome run_spectrum_fit(const Context& cx) {
  const Scenario& sc = cx.sc;
  std::vector<double> f, y;
  const std::string input = sc.text("spectrum-fit.input_csv");
  Outcome o;
  if (!input.empty()) {
    std::filesystem::path p(input);
    if (p.is_relative()) p = sc.base_dir() / p;
    read_spectrum_csv(p, f, y);
    o.results["synthetic"] = false;
  } else {
    SyntheticSpectrum s;
    s.fwhm_ghz = sc.number("spectrum-fit.line_fwhm_ghz");
    s.f_min_ghz = sc.number("spectrum-fit.f_min_ghz");
    s.f_max_ghz = sc.number("spectrum-fit.f_max_ghz");
    s.points = static_cast<int>(sc.integer("spectrum-fit.points"));
    s.noise = sc.number("spectrum-fit.noise");
    s.seed = cx.seed;
    synthetic_ple_spectrum(cx.system, s, f, y);
    o.results["synthetic"] = true;
  }
  const auto fit = fit_ple_spectrum(f, y, static_cast<int>(sc.integer("spectrum-fit.n_lines")));
  o.csv_name = "spectrum-fit.csv";
  Csv csv({"frequency_ghz", "intensity", "fit"});
  for (std::size_t i = 0; i < f.size(); ++i) csv.row({f[i], y[i], fit.evaluate(f[i])});
  o.csv = csv.str();
  o.results["n_lines_requested"] = sc.integer("spectrum-fit.n_lines");
  o.results["n_lines_fitted"] = fit.lines.size();
  o.results["residual_norm"] = number_or_null(fit.residual_norm);
  Json lines = Json::array();
  for (const auto& l : fit.lines) lines.push_back({{"center_ghz", l.center_ghz}, {"fwhm_ghz", l.fwhm_ghz}, {"amplitude", l.amplitude}});
  o.results["lines"] = lines;
  if (input.empty()) {
    Json ref = Json::array();
    for (const auto& l : ple_line_layout(cx.system))
      ref.push_back({{"label", l.label}, {"center_ghz", l.center_ghz}, {"amplitude", l.amplitude}});
    o.results["reference_lines"] = ref;
  }
  if (fit.flagged) o.flags.push_back("spectrum fit: " + fit.message);
  return o;
}

std::uint64_t effective_seed(const Scenario& sc, const RunOptions& opt) {
  return opt.seed ? *opt.seed : static_cast<std::uint64_t>(sc.integer("seed"));
}

Outcome run_experiment(const Scenario& sc, const std::string& experiment, const RunOptions& opt) {
  const std::uint64_t seed = effective_seed(sc, opt);
  const double tol = opt.tol ? *opt.tol : sc.number("solver.tol");
  if (!(tol >= 1e-12 && tol <= 1e-4)) throw std::invalid_argument("tolerance must lie in [1e-12, 1e-4]");
  const Context cx{sc, make_system(sc), make_ensemble(sc, seed), make_evolve(sc, tol), opt.threads, seed};
  if (experiment == "ramsey" || experiment == "echo") return run_coherence(cx, experiment);
  if (experiment == "pump") return run_pump(cx);
  if (experiment == "stirap") return run_stirap_experiment(cx);
  if (experiment == "fwm") return run_fwm_experiment(cx);
  if (experiment == "spectrum-fit") return run_spectrum_fit(cx);
  throw SchemaError("experiment '" + experiment + "' cannot be run directly");
}

Json field_json(const Scenario& sc, const std::string& key) {
  const auto& f = sc.fields().at(key);
  switch (f.kind) {
    case Kind::kNumber: return f.number;
    case Kind::kInteger: return f.integer;
    case Kind::kBool: return f.flag;
    case Kind::kString:
    case Kind::kChoice: return f.text;
    case Kind::kNumberOrPreset:
      if (!f.text.empty()) {
        const auto v = preset_value(key, f.text);
        return v ? Json(*v) : Json(f.text);
      }
      return f.number;
    case Kind::kNumberList: return f.list;
  }
  return nullptr;
}

Json resolved_config(const Scenario& sc, const RunOptions& opt) {
  Json cfg = Json::object();
  cfg["experiment"] = sc.experiment();
  cfg["seed"] = effective_seed(sc, opt);
  Json presets_used = Json::object();
  for (const auto& section : sc.active_sections()) {
    Json sec = Json::object();
    for (const auto& [key, f] : sc.fields()) {
      if (section_of(key) != section) continue;
      sec[key.substr(section.size() + 1)] = field_json(sc, key);
      if (f.kind == Kind::kNumberOrPreset && !f.text.empty()) presets_used[key] = f.text;
    }
    if (section == "solver" && opt.tol) sec["tol"] = *opt.tol;
    cfg[section] = sec;
  }
  if (!presets_used.empty()) cfg["presets"] = presets_used;
  if (!sc.metadata().empty()) {
    Json meta = Json::object();
    for (const auto& [k, v] : sc.metadata()) meta[k] = v;
    cfg["metadata"] = meta;
  }
  return cfg;
}

std::string summary_text(Json& summary) { return summary.dump(2) + "\n"; }

Json string_array(const std::vector<std::string>& v) {
  Json a = Json::array();
  for (const auto& s : v) a.push_back(s);
  return a;
}

}  // namespace

RunOutput run_scenario(const Scenario& sc, const RunOptions& opt) {
  if (sc.experiment() == "sweep") return run_sweep(sc, std::nullopt, std::nullopt, opt);
  const Outcome o = run_experiment(sc, sc.experiment(), opt);
  Json summary = Json::object();
  summary["schema"] = kSummarySchema;
  summary["experiment"] = sc.experiment();
  summary["config"] = resolved_config(sc, opt);
  summary["results"] = o.results;
  summary["flags"] = string_array(o.flags);
  summary["warnings"] = string_array(o.warnings);
  summary["flagged"] = !o.flags.empty();

  RunOutput out;
  out.experiment = sc.experiment();
  out.csv_name = o.csv_name;
  out.csv = o.csv;
  out.summary = summary_text(summary);
  out.flagged = !o.flags.empty();
  return out;
}

RunOutput run_sweep(const Scenario& sc, std::optional<std::string> parameter, std::optional<std::vector<double>> values,
                    const RunOptions& opt) {
  const std::string param = parameter ? *parameter : sc.text("sweep.parameter");
  const std::vector<double> vals = values ? *values : sc.numbers("sweep.values");
  if (param.empty()) throw SchemaError("sweep needs a parameter (sweep.parameter or --param)");
  if (vals.empty()) throw SchemaError("sweep needs at least one value (sweep.values or --values)");
  const std::string base = sc.target_experiment();
  if (base.empty() || base == "sweep") throw SchemaError("sweep needs a base experiment (sweep.base)");
  const Spec* spec = find_spec(param);
  if (!spec) throw SchemaError("sweep parameter '" + param + "' is not a scenario field");
  if (!is_numeric(spec->kind))
    throw SchemaError("sweep parameter '" + param + "' is a " + kind_name(spec->kind) + " field, not a numeric scalar");

  // Validate every value before running anything.
  std::vector<Scenario> rows(vals.size(), sc);
  for (std::size_t i = 0; i < vals.size(); ++i) rows[i].set_number(param, vals[i]);

  std::vector<Outcome> outcomes(vals.size());
  RunOptions row_opt = opt;
  row_opt.threads = 1;
  parallel_for(vals.size(), opt.threads, [&](std::size_t i) { outcomes[i] = run_experiment(rows[i], base, row_opt); });

  // Table of the scalar numeric results, in the order of the first row.
  std::vector<std::string> columns;
  for (const auto& [k, v] : outcomes.front().results.items())
    if (v.is_number() || v.is_null()) columns.push_back(k);
  std::vector<std::string> header = {param};
  header.insert(header.end(), columns.begin(), columns.end());
  Csv csv(header);
  Json table = Json::array();
  bool flagged = false;
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    std::vector<double> row = {vals[i]};
    for (const auto& c : columns) {
      const auto& v = outcomes[i].results.contains(c) ? outcomes[i].results[c] : Json(nullptr);
      row.push_back(v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN());
    }
    csv.row(row);
    Json r = Json::object();
    r["value"] = vals[i];
    r["results"] = outcomes[i].results;
    r["flags"] = string_array(outcomes[i].flags);
    table.push_back(r);
    flagged = flagged || !outcomes[i].flags.empty();
    for (const auto& w : outcomes[i].warnings)
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }

  Json cfg = resolved_config(sc, opt);
  if (!cfg.contains("sweep")) cfg["sweep"] = Json::object();
  cfg["sweep"]["base"] = base;
  cfg["sweep"]["parameter"] = param;
  cfg["sweep"]["values"] = vals;

  Json summary = Json::object();
  summary["schema"] = kSummarySchema;
  summary["experiment"] = "sweep";
  summary["config"] = cfg;
  summary["results"] = {{"base", base}, {"parameter", param}, {"rows", table}};
  Json flags = Json::array();
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (const auto& f : outcomes[i].flags) flags.push_back("row " + std::to_string(i) + ": " + f);
  summary["flags"] = flags;
  summary["warnings"] = string_array(warnings);
  summary["flagged"] = flagged;

  RunOutput out;
  out.experiment = "sweep";
  out.csv_name = "sweep.csv";
  out.csv = csv.str();
  out.summary = summary_text(summary);
  out.flagged = flagged;
  return out;
}

void write_output(const RunOutput& output, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw IoError("error while writing '" + p.string() + "'");
  };
  write(dir / output.csv_name, output.csv);
  write(dir / "summary.json", output.summary);
}

}  // namespace sivsim
