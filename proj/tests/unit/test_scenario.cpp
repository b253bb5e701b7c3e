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

#include <cmath>
#include <filesystem>
#include <fstream>

#include <catch_amalgamated.hpp>

#include "json.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/presets.hpp"
#include "sivsim/scenario.hpp"
#include "sivsim/units.hpp"

using namespace sivsim;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

int schema_line(const std::string& text) {
  try {
    Scenario::load_string(text);
  } catch (const SchemaError& e) {
    return e.line();
  }
  return 0;
}

const char* kQuickRamsey = R"(experiment: ramsey
ensemble:
  n_emitters: 6
ramsey:
  tau_start_ns: 0.03
  tau_stop_ns: 0.1
  tau_points: 6
)";

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("sivsim_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("every bundled scenario parses") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(SIVSIM_SCENARIO_DIR)) {
    if (entry.path().extension() != ".scenario") continue;
    INFO(entry.path());
    CHECK_NOTHROW(Scenario::load_file(entry.path()));
    ++count;
  }
  CHECK(count >= 6);
}

TEST_CASE("schema violations carry the offending line") {
  CHECK_THROWS_AS(Scenario::load_string(""), SchemaError);
  CHECK_THROWS_AS(Scenario::load_string("# only a comment\n"), SchemaError);
  CHECK_THROWS_AS(Scenario::load_string("- a\n- b\n"), SchemaError);
  CHECK_THROWS_AS(Scenario::load_string("seed: 1\n"), SchemaError);  // no experiment
  CHECK(schema_line("experiment: ramsey\nramsey:\n  eid_ghz: 1\n  bogus: 2\n") == 4);
  CHECK(schema_line("experiment: ramsey\nfoo: 1\n") == 2);
  CHECK(schema_line("experiment: ramsey\nramsey:\n  eid_ghz: fast\n") == 3);
  CHECK(schema_line("experiment: ramsey\nramsey:\n  eid_ghz: -0.1\n") == 3);
  CHECK(schema_line("experiment: ramsey\nramsey:\n  transition: E\n") == 3);
  CHECK(schema_line("experiment: ramsey\nramsey:\n  tau_points: 2.5\n") == 3);
  CHECK(schema_line("experiment: ramsey\nsystem:\n  decoherence: maybe\n") == 3);
  CHECK(schema_line("experiment: teleport\n") == 1);
  CHECK(schema_line("experiment: ramsey\n\npump:\n  duration_ns: 3\n") == 3);
  CHECK(schema_line("experiment: ramsey\nramsey:\n  eid_ghz: 1\n  eid_ghz: 2\n") == 4);
  CHECK(schema_line("experiment: ramsey\nramsey:\n  tau_start_ns: 0.2\n  tau_stop_ns: 0.1\n") == 4);
  CHECK(schema_line("experiment: pump\npump:\n  rabi_per_ns: ideal\n") == 3);
  CHECK(schema_line("experiment: ramsey\nramsey: [1, 2]\n") == 2);
  CHECK(schema_line("experiment: ramsey\nensemble:\n  n_emitters: 65\n") == 3);
  CHECK(schema_line("experiment: sweep\n") == 1);
  CHECK(schema_line("experiment: ramsey\nramsey:\n  eid_ghz: [1\n") > 0);
}

TEST_CASE("defaults, presets and metadata") {
  const auto sc = Scenario::load_string("experiment: stirap\nmetadata:\n  author: lab\nstirap:\n  signal_area_rad: ideal\n");
  CHECK(sc.number("stirap.signal_area_rad") == presets::kRamanAreaIdeal);
  CHECK(sc.number("stirap.control_area_rad") == presets::kRamanAreaReference);
  CHECK(sc.preset("stirap.signal_area_rad") == std::optional<std::string>("ideal"));
  CHECK(sc.number("stirap.common_detuning_ghz") == 70.0);
  CHECK(sc.integer("ensemble.n_emitters") == 10);
  CHECK(sc.metadata().at("author") == "lab");
  CHECK(sc.active_sections() == std::vector<std::string>{"system", "ensemble", "solver", "stirap"});
  CHECK(preset_value("pump.rabi_per_ns", "reference") == presets::kPumpRabiPerNs);
  CHECK_FALSE(preset_value("pump.rabi_per_ns", "ideal").has_value());
}

TEST_CASE("set_number validates like the parser") {
  auto sc = Scenario::load_string(kQuickRamsey);
  sc.set_number("ramsey.eid_ghz", 0.2);
  CHECK(sc.number("ramsey.eid_ghz") == 0.2);
  CHECK_THROWS_AS(sc.set_number("ramsey.eid_ghz", -1.0), SchemaError);
  CHECK_THROWS_AS(sc.set_number("ramsey.transition", 1.0), SchemaError);
  CHECK_THROWS_AS(sc.set_number("ramsey.nope", 1.0), SchemaError);
  CHECK_THROWS_AS(sc.set_number("ensemble.n_emitters", 2.5), SchemaError);
  sc.set_number("ensemble.n_emitters", 4);
  CHECK(sc.integer("ensemble.n_emitters") == 4);
}

TEST_CASE("schema table documents every field") {
  const auto info = scenario_schema();
  CHECK(info.size() > 60);
  for (const auto& f : info) {
    CHECK_FALSE(f.key.empty());
    CHECK_FALSE(f.kind.empty());
  }
}

TEST_CASE("run output: CSV header, summary and determinism") {
  const auto sc = Scenario::load_string(kQuickRamsey);
  RunOptions one;
  const auto a = run_scenario(sc, one);
  RunOptions many;
  many.threads = 3;
  const auto b = run_scenario(sc, many);
  CHECK(a.summary == b.summary);
  CHECK(a.csv == b.csv);
  CHECK(a.csv_name == "ramsey.csv");
  CHECK(a.csv.rfind("tau_ns,upper_population,lower_population,visibility,fit_visibility\n", 0) == 0);
  CHECK(std::count(a.csv.begin(), a.csv.end(), '\n') == 7);

  const auto j = Json::parse(a.summary);
  CHECK(j["schema"] == "sivsim.summary/1");
  CHECK(j["config"]["ramsey"]["tau_points"] == 6);
  CHECK(j["config"]["ensemble"]["n_emitters"] == 6);
  CHECK_FALSE(j["config"].contains("pump"));
  CHECK(j["results"]["t2_star_ns"].get<double>() > 0.0);
  CHECK(j["flagged"] == false);
}

TEST_CASE("tolerance and seed overrides are echoed") {
  const auto sc = Scenario::load_string(kQuickRamsey);
  RunOptions opt;
  opt.tol = 1e-7;
  opt.seed = 42;
  const auto j = Json::parse(run_scenario(sc, opt).summary);
  CHECK(j["config"]["solver"]["tol"] == 1e-7);
  CHECK(j["config"]["seed"] == 42);
  opt.tol = 1.0;
  CHECK_THROWS_AS(run_scenario(sc, opt), std::invalid_argument);
}

TEST_CASE("a flagged fit marks the run") {
  auto sc = Scenario::load_string(
      "experiment: ramsey\nsystem:\n  decoherence: false\nensemble:\n  n_emitters: 1\nramsey:\n  eid_ghz: 0\n"
      "  pulse_fwhm_ns: 0.0005\n  initial_state: ground\n  tau_points: 6\n");
  const auto out = run_scenario(sc);
  CHECK(out.flagged);
  const auto j = Json::parse(out.summary);
  CHECK(j["flagged"] == true);
  CHECK(j["flags"].size() == 1);
}

TEST_CASE("single-value sweep reproduces the plain run") {
  auto sc = Scenario::load_string(kQuickRamsey);
  const auto sweep = Json::parse(run_sweep(sc, "ramsey.eid_ghz", std::vector<double>{0.3}).summary);
  sc.set_number("ramsey.eid_ghz", 0.3);
  const auto plain = Json::parse(run_scenario(sc).summary);
  REQUIRE(sweep["results"]["rows"].size() == 1);
  CHECK(sweep["results"]["rows"][0]["results"] == plain["results"]);
}

TEST_CASE("sweep rows keep input order and are thread independent") {
  const auto sc = Scenario::load_string(kQuickRamsey);
  const std::vector<double> values = {0.9, 0.0, 0.45};
  RunOptions many;
  many.threads = 3;
  const auto a = run_sweep(sc, "ramsey.eid_ghz", values);
  const auto b = run_sweep(sc, "ramsey.eid_ghz", values, many);
  CHECK(a.summary == b.summary);
  CHECK(a.csv == b.csv);
  const auto j = Json::parse(a.summary);
  for (std::size_t i = 0; i < values.size(); ++i) CHECK(j["results"]["rows"][i]["value"] == values[i]);
  CHECK(a.csv.rfind("ramsey.eid_ghz,t2_star_ns,", 0) == 0);
}

TEST_CASE("sweep targets must be numeric scalars") {
  const auto sc = Scenario::load_string(kQuickRamsey);
  CHECK_THROWS_AS(run_sweep(sc, "ramsey.transition", std::vector<double>{1}), SchemaError);
  CHECK_THROWS_AS(run_sweep(sc, "ramsey.unknown", std::vector<double>{1}), SchemaError);
  CHECK_THROWS_AS(run_sweep(sc, "ramsey.eid_ghz", std::vector<double>{}), SchemaError);
  CHECK_THROWS_AS(run_sweep(sc, "ramsey.eid_ghz", std::vector<double>{-1}), SchemaError);
}

TEST_CASE("scenario-defined sweep") {
  const auto sc = Scenario::load_string(
      "experiment: sweep\nramsey:\n  tau_points: 5\n  tau_stop_ns: 0.08\nsweep:\n  base: ramsey\n"
      "  parameter: ramsey.pulse_fwhm_ns\n  values: [0.004, 0.012]\n");
  const auto out = run_scenario(sc);
  CHECK(out.csv_name == "sweep.csv");
  const auto j = Json::parse(out.summary);
  CHECK(j["experiment"] == "sweep");
  CHECK(j["results"]["rows"].size() == 2);
  CHECK(j["config"]["sweep"]["base"] == "ramsey");
}

TEST_CASE("fwm gain is 2 pi periodic in the Stokes phase") {
  const auto sc = Scenario::load_string("experiment: fwm\nfwm:\n  phase_points: 8\n  time_samples: 401\n");
  const auto j = Json::parse(run_sweep(sc, "fwm.stokes_phase_rad", std::vector<double>{0.3, 0.3 + kTwoPi}).summary);
  const auto& rows = j["results"]["rows"];
  CHECK(std::abs(rows[0]["results"]["max_gain"].get<double>() - rows[1]["results"]["max_gain"].get<double>()) < 1e-9);
  CHECK(std::abs(rows[0]["results"]["min_gain"].get<double>() - rows[1]["results"]["min_gain"].get<double>()) < 1e-9);
}

TEST_CASE("spectrum fit reads a CSV relative to the scenario") {
  const auto dir = temp_dir("spectrum");
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "ple.csv");
    csv << "frequency_ghz,intensity\n";
    for (int i = 0; i <= 400; ++i) {
      const double f = -100 + 0.5 * i;
      csv << f << "," << std::exp(-4 * std::log(2.0) * std::pow((f + 30) / 10, 2)) +
                             0.5 * std::exp(-4 * std::log(2.0) * std::pow((f - 40) / 10, 2))
          << "\n";
    }
  }
  const auto sc = Scenario::load_string("experiment: spectrum-fit\nspectrum-fit:\n  input_csv: ple.csv\n  n_lines: 2\n", dir);
  const auto j = Json::parse(run_scenario(sc).summary);
  CHECK(j["results"]["synthetic"] == false);
  REQUIRE(j["results"]["lines"].size() == 2);
  CHECK(std::abs(j["results"]["lines"][0]["center_ghz"].get<double>() + 30) < 1e-3);
  CHECK(std::abs(j["results"]["lines"][1]["center_ghz"].get<double>() - 40) < 1e-3);

  const auto missing = Scenario::load_string("experiment: spectrum-fit\nspectrum-fit:\n  input_csv: none.csv\n", dir);
  CHECK_THROWS_AS(run_scenario(missing), IoError);
}

TEST_CASE("write_output creates the directory and both files") {
  const auto dir = temp_dir("write") / "nested";
  const auto out = run_scenario(Scenario::load_string(kQuickRamsey));
  write_output(out, dir);
  CHECK(fs::exists(dir / "ramsey.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  std::ifstream in(dir / "summary.json");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text == out.summary);
  // A regular file where the directory should be.
  const auto blocker = temp_dir("blocker");
  std::ofstream(blocker) << "x";
  CHECK_THROWS_AS(write_output(out, blocker / "sub"), IoError);
  CHECK_THROWS_AS(Scenario::load_file(temp_dir("absent") / "x.scenario"), IoError);
}
