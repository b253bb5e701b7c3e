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

#include "sivsim/density_matrix.hpp"
#include "sivsim/hamiltonian.hpp"
#include "sivsim/level_system.hpp"

namespace sivsim {

/// d rho / dt = -i [H, rho]
///              + sum_ij Gamma_ij (rho_ii |j><j| - 1/2 {|i><i|, rho})
/// with hbar = 1 and H in rad/ns.
DensityMatrix lindblad_rhs(const DensityMatrix& rho, const Hamiltonian& h, const RateMatrix& rates);

inline DensityMatrix lindblad_rhs(const DensityMatrix& rho, const Hamiltonian& h,
                                  const LevelSystem& system) {
  return lindblad_rhs(rho, h, system.rates());
}

/// In-place variant used by the integrator. `extra_excited_dephasing` is
/// added to Gamma_33 and Gamma_44.
void lindblad_rhs_into(const DensityMatrix& rho, const Hamiltonian& h, const RateMatrix& rates,
                       double extra_excited_dephasing, DensityMatrix& out);

}  // namespace sivsim
