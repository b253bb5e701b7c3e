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

#include <cstddef>
#include <vector>

#include "sivsim/density_matrix.hpp"
#include "sivsim/level_system.hpp"
#include "sivsim/pulses.hpp"

namespace sivsim {

struct EvolveOptions {
  /// Relative (and absolute) tolerance of the embedded 5(4) pair.
  double tol = 1e-9;
  /// Output times inside [t0, t1], ascending. Empty means {t0, t1}.
  std::vector<double> sample_times;
  /// Fixed-step mode: plain Dormand-Prince steps of `fixed_step_ns`
  /// with no error control and no breakpoint alignment.
  bool fixed_step = false;
  double fixed_step_ns = 0.0;
  /// Upper bound on the adaptive step; 0 means unbounded.
  double max_step_ns = 0.0;
  std::size_t max_steps = 20'000'000;
  /// Throw SolverError when an accepted state breaks the invariants.
  /// Diagnostics are recorded in Trajectory::worst either way.
  bool check_invariants = true;
  /// Eigen-decompose every accepted state so worst.min_eigenvalue is exact.
  bool exact_diagnostics = false;
  StateTolerances invariant_tolerances{};
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Worst diagnostics over all accepted steps.
  StateDiagnostics worst{};

  const DensityMatrix& final_state() const { return states.back(); }
};

/// Integrate the master equation from rho0 at t0_ns to t1_ns. Throws
/// SolverError on step-size underflow or when an accepted state breaks the
/// density-matrix invariants; std::invalid_argument for bad inputs.
Trajectory evolve(const DensityMatrix& rho0, const LevelSystem& system, const PulseTimeline& timeline,
                  double t0_ns, double t1_ns, const EvolveOptions& options = {},
                  double emitter_detuning_ghz = 0.0);

}  // namespace sivsim
