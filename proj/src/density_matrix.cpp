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

#include "sivsim/density_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sivsim/level_system.hpp"

namespace sivsim {

StateDiagnostics validate_state(const DensityMatrix& rho) {
  StateDiagnostics d;
  d.trace_error = std::abs(rho.trace() - 1.0);
  double herm = 0.0;
  for (int i = 0; i < kLevels; ++i)
    for (int j = i; j < kLevels; ++j) herm = std::max(herm, std::abs(rho(i, j) - std::conj(rho(j, i))));
  d.hermiticity_error = herm;
  const DensityMatrix hermitian_part = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(hermitian_part, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

bool satisfies(const StateDiagnostics& d, const StateTolerances& tol) {
  return d.trace_error <= tol.trace && d.hermiticity_error <= tol.hermiticity &&
         d.min_eigenvalue >= tol.min_eigenvalue;
}

DensityMatrix pure_state(int level) {
  if (level < 0 || level >= kLevels) throw std::out_of_range("level index");
  DensityMatrix rho = DensityMatrix::Zero();
  rho(level, level) = 1.0;
  return rho;
}

DensityMatrix thermal_ground_state(double temperature_k, double ground_splitting_ghz) {
  const double r = boltzmann_ratio(temperature_k, ground_splitting_ghz);
  DensityMatrix rho = DensityMatrix::Zero();
  rho(kGround1, kGround1) = 1.0 / (1.0 + r);
  rho(kGround2, kGround2) = r / (1.0 + r);
  return rho;
}

}  // namespace sivsim
