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

// sim: scenario-driven front end. Talks to the library only through the C API.
//
// Exit codes: 0 ok, 1 a fit or check was flagged (artifacts still written),
// 2 usage or scenario error, 3 file i/o, 4 solver failure, 5 internal error.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sivsim/sivsim.h"

namespace {

enum Exit { kOk = 0, kFlagged = 1, kUsage = 2, kIo = 3, kSolver = 4, kInternal = 5 };

int exit_code(sivsim_status s) {
  switch (s) {
    case SIVSIM_OK: return kOk;
    case SIVSIM_ERR_INVALID_ARGUMENT:
    case SIVSIM_ERR_SCHEMA: return kUsage;
    case SIVSIM_ERR_IO: return kIo;
    case SIVSIM_ERR_SOLVER: return kSolver;
    case SIVSIM_ERR_INTERNAL: return kInternal;
  }
  return kInternal;
}

int report(sivsim_status s, const std::string& where) {
  const int line = sivsim_last_error_line();
  if (line > 0) {
    std::fprintf(stderr, "sim: %s:%d: %s: %s\n", where.c_str(), line, sivsim_status_string(s), sivsim_last_error());
  } else {
    std::fprintf(stderr, "sim: %s: %s: %s\n", where.c_str(), sivsim_status_string(s), sivsim_last_error());
  }
  return exit_code(s);
}

struct ScenarioDeleter {
  void operator()(sivsim_scenario* p) const { sivsim_scenario_free(p); }
};
struct ResultDeleter {
  void operator()(sivsim_result* p) const { sivsim_result_free(p); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Four-level emitter ensemble simulator", "sim"};
  std::string experiment;
  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::optional<double> tol;
  std::string param;
  std::vector<double> values;
  bool quiet = false;

  app.add_option("experiment", experiment, "ramsey, echo, pump, stirap, fwm, spectrum-fit, sweep, or schema")
      ->required()
      ->check(CLI::IsMember({"ramsey", "echo", "pump", "stirap", "fwm", "spectrum-fit", "sweep", "schema"}));
  app.add_option("--scenario", scenario_path, "scenario file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: scenario output_dir, else ./out)");
  app.add_option("--seed", seed, "random seed override");
  app.add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::Range(0, 1024));
  app.add_option("--tol", tol, "integrator tolerance override")->check(CLI::Range(1e-12, 1e-4));
  app.add_option("--param", param, "sweep: scalar field to vary, e.g. stirap.two_photon_detuning_ghz");
  app.add_option("--values", values, "sweep: comma-separated values")->delimiter(',');
  app.add_flag("-q,--quiet", quiet, "do not print the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (experiment == "schema") {
    std::printf("key\ttype\tdefault\tconstraint\n%s", sivsim_schema_table());
    return kOk;
  }
  if (scenario_path.empty()) {
    std::fprintf(stderr, "sim: --scenario is required\n");
    return kUsage;
  }
  if (experiment != "sweep" && (!param.empty() || !values.empty())) {
    std::fprintf(stderr, "sim: --param/--values only apply to the sweep command\n");
    return kUsage;
  }

  sivsim_scenario* raw = nullptr;
  if (const auto s = sivsim_scenario_load(scenario_path.c_str(), &raw); s != SIVSIM_OK) return report(s, scenario_path);
  std::unique_ptr<sivsim_scenario, ScenarioDeleter> scenario(raw);

  const std::string declared = sivsim_scenario_experiment(scenario.get());
  if (declared != experiment) {
    std::fprintf(stderr, "sim: %s: scenario declares experiment '%s', not '%s'\n", scenario_path.c_str(),
                 declared.c_str(), experiment.c_str());
    return kUsage;
  }

  sivsim_run_options opt;
  sivsim_run_options_init(&opt);
  opt.threads = threads;
  if (seed) {
    opt.has_seed = 1;
    opt.seed = *seed;
  }
  if (tol) {
    opt.has_tol = 1;
    opt.tol = *tol;
  }

  sivsim_result* res = nullptr;
  sivsim_status status;
  if (experiment == "sweep") {
    status = sivsim_sweep(scenario.get(), param.empty() ? nullptr : param.c_str(),
                          values.empty() ? nullptr : values.data(), values.size(), &opt, &res);
  } else {
    status = sivsim_run(scenario.get(), &opt, &res);
  }
  if (status != SIVSIM_OK) return report(status, scenario_path);
  std::unique_ptr<sivsim_result, ResultDeleter> result(res);

  if (out_dir.empty()) out_dir = sivsim_scenario_output_dir(scenario.get());
  if (out_dir.empty()) out_dir = "out";
  if (const auto s = sivsim_result_write(result.get(), out_dir.c_str()); s != SIVSIM_OK) return report(s, out_dir);

  if (!quiet) std::fputs(sivsim_result_summary(result.get()), stdout);
  std::fprintf(stderr, "sim: wrote %s/%s and %s/summary.json\n", out_dir.c_str(), sivsim_result_csv_name(result.get()),
               out_dir.c_str());
  if (sivsim_result_flagged(result.get())) {
    std::fprintf(stderr, "sim: result flagged, see the flags in summary.json\n");
    return kFlagged;
  }
  return kOk;
}
