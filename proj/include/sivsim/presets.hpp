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

// Calibrated drive strengths and medium parameters. Each value is the
// output of a calibration routine run on the default level system and
// ensemble (10 GHz, 10 gauss-hermite nodes) at tolerance 1e-9; the test
// suite recomputes every one of them.

#include "sivsim/units.hpp"

namespace sivsim::presets {

/// Excitation-induced dephasing for the Ramsey (total area pi) and echo
/// (total area 2 pi) sequences; linear in the total pulse area.
inline constexpr double kRamseyEidGhz = 0.45;
inline constexpr double kEchoEidGhz = 0.9;

/// Square pump on D, 100 ns: rho22 = 0.19 six ns after the pump ends
/// (calibrate_pump_rabi).
inline constexpr double kPumpRabiPerNs = 24.21639529;

/// Raman pair, Delta = 70 GHz, 50 ps FWHM, zero delay and two-photon
/// detuning, after the pump preset.
inline constexpr double kRamanFwhmNs = 0.05;
inline constexpr double kRamanDetuningGhz = 70.0;
/// Equal signal and control areas giving a transfer efficiency of 0.48
/// (calibrate_raman_area).
inline constexpr double kRamanAreaReference = 10.358861;
/// Areas of the first full Raman rotation with the rates switched off
/// during the pulses (calibrate_raman_area_max).
inline constexpr double kRamanAreaIdeal = 15.269777;

/// Four-wave mixing medium: control Rabi frequency 2 pi x 20 GHz, optical
/// depth, pumped inversion six ns after the pump, and the Stokes seed
/// ratio from calibrate_stokes_ratio on a 32-point phase grid.
inline constexpr double kFwmControlRabiPerNs = kTwoPi * 20.0;
inline constexpr double kFwmOpticalDepth = 4000.0;
inline constexpr double kFwmSpinWaveDecayPerNs = 1.0 / 0.1;
inline constexpr double kFwmStokesRatio = 0.8521;

}  // namespace sivsim::presets
