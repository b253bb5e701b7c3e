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

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "sivsim/level_system.hpp"
#include "sivsim/pulses.hpp"

namespace sivsim {

using Hamiltonian = Eigen::Matrix4cd;  // rad/ns, hbar = 1

/// Static multi-level rotating frame for a set of drives.
///
/// Every driven transition (g, e) with carrier detuning d fixes
/// H_ee - H_gg = -2 pi d. Levels are assigned by walking the drive graph
/// from the lowest level of each connected component, so a Raman pair on A
/// and B leaves the two-photon detuning on |2>. Two carriers on one
/// transition, or a loop of drives whose detunings do not close, cannot be
/// represented and are rejected with std::invalid_argument.
class RwaFrame {
 public:
  RwaFrame(const LevelSystem& system, const std::vector<DriveField>& drives);

  /// Frame detuning of each level (rad/ns) for an emitter at zero detuning.
  const std::array<double, kLevels>& diagonal() const { return diagonal_; }

  /// Fill `h` for time t. `emitter_detuning_ghz` is the detuning of the
  /// applied fields from this emitter's lines; it shifts |3> and |4> by
  /// -2 pi * emitter_detuning.
  void assemble(const std::vector<DriveField>& drives, double emitter_detuning_ghz, double t_ns,
                Hamiltonian& h) const;

 private:
  std::array<double, kLevels> diagonal_{};
};

/// Convenience wrapper building the frame on every call.
Hamiltonian build_rwa_hamiltonian(const LevelSystem& system, const std::vector<DriveField>& drives,
                                  double emitter_detuning_ghz, double t_ns);

}  // namespace sivsim
