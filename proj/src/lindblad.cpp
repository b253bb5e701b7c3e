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

#include "sivsim/lindblad.hpp"

namespace sivsim {

void lindblad_rhs_into(const DensityMatrix& rho, const Hamiltonian& h, const RateMatrix& rates,
                       double extra_excited_dephasing, DensityMatrix& out) {
  const std::complex<double> minus_i(0.0, -1.0);
  out.noalias() = minus_i * (h * rho - rho * h);

  // Anticommutator part: every element (k, l) decays at (g_k + g_l) / 2,
  // where g_k sums all rates out of k including pure dephasing.
  double g[kLevels];
  for (int k = 0; k < kLevels; ++k) g[k] = rates.row(k).sum();
  g[kExcited3] += extra_excited_dephasing;
  g[kExcited4] += extra_excited_dephasing;
  for (int l = 0; l < kLevels; ++l)
    for (int k = 0; k < kLevels; ++k) out(k, l) -= 0.5 * (g[k] + g[l]) * rho(k, l);

  // Feeding term rho_ii |j><j|, diagonal j = i included.
  for (int j = 0; j < kLevels; ++j) {
    std::complex<double> feed = 0.0;
    for (int i = 0; i < kLevels; ++i) feed += rates(i, j) * rho(i, i);
    if (is_excited(j)) feed += extra_excited_dephasing * rho(j, j);
    out(j, j) += feed;
  }
}

DensityMatrix lindblad_rhs(const DensityMatrix& rho, const Hamiltonian& h, const RateMatrix& rates) {
  DensityMatrix out;
  lindblad_rhs_into(rho, h, rates, 0.0, out);
  return out;
}

}  // namespace sivsim
