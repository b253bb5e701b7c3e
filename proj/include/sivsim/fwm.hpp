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

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sivsim/level_system.hpp"

namespace sivsim {

using Complex = std::complex<double>;

/// Linearised, adiabatically eliminated double-Lambda medium of unit length:
///
///   dS/dz  =  i a B
///   dK~/dz = -i b B
///   dB/dt  =  i n (a S + b K~) - (gamma_B + i delta') B
///
/// S is the signal envelope, K~ the complex conjugate of the Stokes
/// envelope, B the spin wave, n the ground-state population inversion and
/// delta' = 2 pi (delta2 + stark_signal - stark_stokes).
struct FwmMedium {
  double coupling_signal = 0.0;  // a, 1/sqrt(ns)
  double coupling_stokes = 0.0;  // b, 1/sqrt(ns)
  double stark_signal_ghz = 0.0;
  double stark_stokes_ghz = 0.0;
  double spin_wave_decay = 10.0;  // 1/ns
  double two_photon_detuning_ghz = 0.0;
  double population_inversion = 1.0;
  double length = 1.0;

  void validate() const;
  /// delta' in rad/ns.
  double effective_detuning() const;
};

/// Which excited level closes the Stokes Lambda. The Stokes arm is detuned
/// by Delta + dg (kExcited4) or Delta + dg + de (kExcited3).
enum class StokesAnchor { kExcited4, kExcited3 };

std::string_view to_string(StokesAnchor a);
StokesAnchor stokes_anchor_from_string(std::string_view name);

/// Couplings Omega_c sqrt(d gamma_rad) / (2 pi Delta_arm) and Stark shifts
/// Omega_c^2 / (4 * 2 pi Delta_arm), reported in GHz. gamma_rad is the
/// radiative rate of |4>. The returned medium has n = 1, delta2 = 0 and the
/// default spin-wave decay.
FwmMedium adiabatic_couplings(double control_rabi, double delta_ghz, const LevelSystem& system,
                              double optical_depth, StokesAnchor anchor = StokesAnchor::kExcited4);

/// Warning text when |Delta| is not large against the optical linewidth.
std::optional<std::string> adiabatic_warning(double delta_ghz, const LevelSystem& system);

struct FwmSeeds {
  std::vector<double> t_ns;    // ascending
  std::vector<Complex> signal; // S(0, t)
  std::vector<Complex> stokes; // K~(0, t)
  std::vector<Complex> spin_wave;  // B(z, t0) on the z nodes; empty = 0
};

struct FwmGridOptions {
  int nz = 32;
  /// Largest number of time sub-steps per seed interval the stability
  /// guard may introduce before giving up.
  int max_refine = 64;
};

struct FwmGrid {
  Eigen::VectorXd z;
  std::vector<double> t_ns;
  /// (z node, time) samples.
  Eigen::MatrixXcd signal, stokes, spin_wave;
  int substeps = 1;

  std::vector<Complex> signal_out() const;
  std::vector<Complex> stokes_out() const;
};

/// Heun steps in t with trapezoidal z sweeps; second order in both.
/// Throws SolverError when the stable step needs more than max_refine
/// sub-steps per seed interval.
FwmGrid propagate_fwm(const FwmMedium& medium, const FwmSeeds& seeds, const FwmGridOptions& options = {});

/// Energy ratio  int |S_out|^2 dt / int |S_in|^2 dt  (trapezoid rule).
double signal_gain(const std::vector<double>& t_ns, const std::vector<Complex>& in, const std::vector<Complex>& out);

/// Gaussian signal and Stokes seed pulses on a uniform time grid.
struct FwmPulseSeeds {
  double t_end_ns = 8.0;
  int samples = 1601;
  double center_ns = 4.0;
  double fwhm_ns = 2.0;
  Complex signal = 1.0;
  Complex stokes = 0.0;

  FwmSeeds sample(double signal_phase_rad) const;
};

struct PhasePoint {
  double phase_rad;
  double signal_gain;
  /// NaN without a Stokes seed.
  double stokes_gain;
};

/// Propagate once per phase applied to the signal seed (parallel over phases).
std::vector<PhasePoint> phase_response(const FwmMedium& medium, const FwmPulseSeeds& seeds,
                                       const std::vector<double>& phases_rad, const FwmGridOptions& options = {},
                                       int threads = 1);

/// Population inversion rho11 - rho22 relaxing from the pumped value
/// 1 - 2 rho22_pumped towards the thermal value with time constant T1.
double rethermalized_inversion(double rho22_pumped, double delay_ns, double t1_ns, double temperature_k,
                               double ground_splitting_ghz = 48.0);

struct StokesCalibration {
  double stokes_ratio = 0.0;  // |K~ seed| / |S seed|
  double min_gain = 0.0;
  double max_gain = 0.0;
  double margin = 0.0;  // min(0.2 - min_gain, max_gain - 1.6, co-movement margins)
};

/// One-dimensional search over the real Stokes-to-signal seed ratio in
/// [0, max_ratio] maximizing the absorption / amplification margin on
/// `phases_rad`. Uses that the outputs are linear in the seeds: two
/// propagations (signal only, Stokes only) give every ratio and phase.
StokesCalibration calibrate_stokes_ratio(const FwmMedium& medium, const FwmPulseSeeds& seeds,
                                         const std::vector<double>& phases_rad, double max_ratio = 3.0,
                                         const FwmGridOptions& options = {});

}  // namespace sivsim
