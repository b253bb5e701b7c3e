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

#include <Eigen/Dense>

namespace sivsim {

/// 4x4 single-emitter density matrix in the level basis of level_system.hpp.
using DensityMatrix = Eigen::Matrix4cd;

struct StateDiagnostics {
  double trace_error = 0.0;        // |Tr rho - 1|
  double hermiticity_error = 0.0;  // max |rho_ij - conj(rho_ji)|
  double min_eigenvalue = 0.0;     // of the Hermitian part
};

struct StateTolerances {
  double trace = 1e-9;
  double hermiticity = 1e-10;
  double min_eigenvalue = -1e-8;
};

StateDiagnostics validate_state(const DensityMatrix& rho);
bool satisfies(const StateDiagnostics& d, const StateTolerances& tol = {});

DensityMatrix pure_state(int level);

/// Diagonal ground-doublet state with rho22 / rho11 = exp(-h dg / kB T) and
/// empty excited levels.
DensityMatrix thermal_ground_state(double temperature_k, double ground_splitting_ghz);

inline double population(const DensityMatrix& rho, int level) { return rho(level, level).real(); }

}  // namespace sivsim
