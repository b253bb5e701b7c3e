/*
 * Copyright 2026 The sivsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the sivsim library. All objects are opaque handles owned
 * by the library; every fallible call returns a sivsim_status and leaves a
 * message retrievable with sivsim_last_error() on the calling thread. */
#ifndef SIVSIM_SIVSIM_H_
#define SIVSIM_SIVSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SIVSIM_BUILDING_LIBRARY)
#    define SIVSIM_API __declspec(dllexport)
#  else
#    define SIVSIM_API __declspec(dllimport)
#  endif
#else
#  define SIVSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sivsim_status {
  SIVSIM_OK = 0,
  SIVSIM_ERR_INVALID_ARGUMENT = 1, /* bad parameter value or null handle */
  SIVSIM_ERR_SCHEMA = 2,           /* scenario text violates the schema */
  SIVSIM_ERR_IO = 3,
  SIVSIM_ERR_SOLVER = 4,           /* integrator failure */
  SIVSIM_ERR_INTERNAL = 5
} sivsim_status;

typedef struct sivsim_scenario sivsim_scenario;
typedef struct sivsim_result sivsim_result;

typedef struct sivsim_run_options {
  int threads;     /* worker threads; <= 0 uses the hardware concurrency */
  int has_seed;
  uint64_t seed;   /* overrides the scenario seed when has_seed != 0 */
  int has_tol;
  double tol;      /* overrides solver.tol when has_tol != 0 */
} sivsim_run_options;

SIVSIM_API const char* sivsim_version(void);
SIVSIM_API const char* sivsim_status_string(sivsim_status status);

/* Message of the last failed call on this thread ("" if none). */
SIVSIM_API const char* sivsim_last_error(void);
/* 1-based scenario line of the last schema error, or -1. */
SIVSIM_API int sivsim_last_error_line(void);

/* Tab-separated schema table: key, type, default, constraint. */
SIVSIM_API const char* sivsim_schema_table(void);

SIVSIM_API sivsim_status sivsim_scenario_load(const char* path, sivsim_scenario** out);
/* base_dir resolves relative paths inside the scenario; may be NULL. */
SIVSIM_API sivsim_status sivsim_scenario_parse(const char* text, const char* base_dir, sivsim_scenario** out);
SIVSIM_API void sivsim_scenario_free(sivsim_scenario* scenario);
/* Borrowed strings, valid while the scenario lives. */
SIVSIM_API const char* sivsim_scenario_experiment(const sivsim_scenario* scenario);
SIVSIM_API const char* sivsim_scenario_output_dir(const sivsim_scenario* scenario);
SIVSIM_API sivsim_status sivsim_scenario_set_number(sivsim_scenario* scenario, const char* key, double value);

SIVSIM_API void sivsim_run_options_init(sivsim_run_options* options);

/* options may be NULL for defaults (one thread, scenario seed and tol). */
SIVSIM_API sivsim_status sivsim_run(const sivsim_scenario* scenario, const sivsim_run_options* options,
                                    sivsim_result** out);
/* parameter == NULL or values == NULL take the scenario's sweep section. */
SIVSIM_API sivsim_status sivsim_sweep(const sivsim_scenario* scenario, const char* parameter, const double* values,
                                      size_t n_values, const sivsim_run_options* options, sivsim_result** out);

SIVSIM_API int sivsim_result_flagged(const sivsim_result* result);
SIVSIM_API const char* sivsim_result_summary(const sivsim_result* result);
SIVSIM_API const char* sivsim_result_csv(const sivsim_result* result);
SIVSIM_API const char* sivsim_result_csv_name(const sivsim_result* result);
SIVSIM_API sivsim_status sivsim_result_write(const sivsim_result* result, const char* dir);
SIVSIM_API void sivsim_result_free(sivsim_result* result);

/* Thermal population of the upper ground level. */
SIVSIM_API sivsim_status sivsim_thermal_rho22(double temperature_k, double ground_splitting_ghz, double* out);
SIVSIM_API sivsim_status sivsim_transfer_efficiency(double rho_i22, double rho_f22, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SIVSIM_SIVSIM_H_ */
