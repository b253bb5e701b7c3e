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

#include "sivsim/sivsim.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "sivsim/density_matrix.hpp"
#include "sivsim/ensemble.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/experiments.hpp"
#include "sivsim/level_system.hpp"
#include "sivsim/scenario.hpp"

struct sivsim_scenario {
  sivsim::Scenario scenario;
};

struct sivsim_result {
  sivsim::RunOutput output;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_last_line = -1;

sivsim_status fail(sivsim_status status, std::string message, int line = -1) {
  g_last_error = std::move(message);
  g_last_line = line;
  return status;
}

void clear_error() {
  g_last_error.clear();
  g_last_line = -1;
}

// Translate the in-flight exception into a status code.
sivsim_status translate() {
  try {
    throw;
  } catch (const sivsim::SchemaError& e) {
    return fail(SIVSIM_ERR_SCHEMA, e.line() > 0 ? e.detail() : e.what(), e.line());
  } catch (const sivsim::IoError& e) {
    return fail(SIVSIM_ERR_IO, e.what());
  } catch (const sivsim::SolverError& e) {
    return fail(SIVSIM_ERR_SOLVER, e.what());
  } catch (const sivsim::EnsembleError& e) {
    return fail(e.solver_failure() ? SIVSIM_ERR_SOLVER : SIVSIM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SIVSIM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(SIVSIM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SIVSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SIVSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SIVSIM_ERR_INTERNAL, "unknown error");
  }
}

sivsim::RunOptions convert(const sivsim_run_options* o) {
  sivsim::RunOptions r;
  if (!o) return r;
  r.threads = o->threads;
  if (o->has_seed) r.seed = o->seed;
  if (o->has_tol) r.tol = o->tol;
  return r;
}

}  // namespace

extern "C" {

const char* sivsim_version(void) { return "0.3.0"; }

const char* sivsim_status_string(sivsim_status status) {
  switch (status) {
    case SIVSIM_OK: return "ok";
    case SIVSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SIVSIM_ERR_SCHEMA: return "schema error";
    case SIVSIM_ERR_IO: return "i/o error";
    case SIVSIM_ERR_SOLVER: return "solver error";
    case SIVSIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sivsim_last_error(void) { return g_last_error.c_str(); }
int sivsim_last_error_line(void) { return g_last_line; }

const char* sivsim_schema_table(void) {
  static const std::string table = [] {
    std::string t;
    for (const auto& f : sivsim::scenario_schema())
      t += f.key + '\t' + f.kind + '\t' + f.default_value + '\t' + f.constraint + '\n';
    return t;
  }();
  return table.c_str();
}

sivsim_status sivsim_scenario_load(const char* path, sivsim_scenario** out) {
  clear_error();
  if (!path || !out) return fail(SIVSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    *out = new sivsim_scenario{sivsim::Scenario::load_file(path)};
    return SIVSIM_OK;
  } catch (...) {
    return translate();
  }
}

sivsim_status sivsim_scenario_parse(const char* text, const char* base_dir, sivsim_scenario** out) {
  clear_error();
  if (!text || !out) return fail(SIVSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    *out = new sivsim_scenario{sivsim::Scenario::load_string(text, base_dir ? base_dir : ".")};
    return SIVSIM_OK;
  } catch (...) {
    return translate();
  }
}

void sivsim_scenario_free(sivsim_scenario* scenario) { delete scenario; }

const char* sivsim_scenario_experiment(const sivsim_scenario* scenario) {
  return scenario ? scenario->scenario.experiment().c_str() : "";
}

const char* sivsim_scenario_output_dir(const sivsim_scenario* scenario) {
  return scenario ? scenario->scenario.text("output_dir").c_str() : "";
}

sivsim_status sivsim_scenario_set_number(sivsim_scenario* scenario, const char* key, double value) {
  clear_error();
  if (!scenario || !key) return fail(SIVSIM_ERR_INVALID_ARGUMENT, "null argument");
  try {
    scenario->scenario.set_number(key, value);
    return SIVSIM_OK;
  } catch (...) {
    return translate();
  }
}

void sivsim_run_options_init(sivsim_run_options* options) {
  if (!options) return;
  *options = sivsim_run_options{1, 0, 0, 0, 0.0};
}

sivsim_status sivsim_run(const sivsim_scenario* scenario, const sivsim_run_options* options, sivsim_result** out) {
  clear_error();
  if (!scenario || !out) return fail(SIVSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    *out = new sivsim_result{sivsim::run_scenario(scenario->scenario, convert(options))};
    return SIVSIM_OK;
  } catch (...) {
    return translate();
  }
}

sivsim_status sivsim_sweep(const sivsim_scenario* scenario, const char* parameter, const double* values,
                           size_t n_values, const sivsim_run_options* options, sivsim_result** out) {
  clear_error();
  if (!scenario || !out) return fail(SIVSIM_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    std::optional<std::string> p;
    if (parameter) p = parameter;
    std::optional<std::vector<double>> v;
    if (values) v = std::vector<double>(values, values + n_values);
    *out = new sivsim_result{sivsim::run_sweep(scenario->scenario, p, v, convert(options))};
    return SIVSIM_OK;
  } catch (...) {
    return translate();
  }
}

int sivsim_result_flagged(const sivsim_result* result) { return result && result->output.flagged ? 1 : 0; }
const char* sivsim_result_summary(const sivsim_result* result) { return result ? result->output.summary.c_str() : ""; }
const char* sivsim_result_csv(const sivsim_result* result) { return result ? result->output.csv.c_str() : ""; }
const char* sivsim_result_csv_name(const sivsim_result* result) { return result ? result->output.csv_name.c_str() : ""; }

sivsim_status sivsim_result_write(const sivsim_result* result, const char* dir) {
  clear_error();
  if (!result || !dir) return fail(SIVSIM_ERR_INVALID_ARGUMENT, "null argument");
  try {
    sivsim::write_output(result->output, dir);
    return SIVSIM_OK;
  } catch (...) {
    return translate();
  }
}

void sivsim_result_free(sivsim_result* result) { delete result; }

sivsim_status sivsim_thermal_rho22(double temperature_k, double ground_splitting_ghz, double* out) {
  clear_error();
  if (!out) return fail(SIVSIM_ERR_INVALID_ARGUMENT, "null argument");
  try {
    *out = sivsim::thermal_ground_state(temperature_k, ground_splitting_ghz)(sivsim::kGround2, sivsim::kGround2).real();
    return SIVSIM_OK;
  } catch (...) {
    return translate();
  }
}

sivsim_status sivsim_transfer_efficiency(double rho_i22, double rho_f22, double* out) {
  clear_error();
  if (!out) return fail(SIVSIM_ERR_INVALID_ARGUMENT, "null argument");
  try {
    *out = sivsim::transfer_efficiency(rho_i22, rho_f22);
    return SIVSIM_OK;
  } catch (...) {
    return translate();
  }
}

}  // extern "C"
