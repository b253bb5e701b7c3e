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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sivsim/density_matrix.hpp"
#include "sivsim/ensemble.hpp"
#include "sivsim/fitting.hpp"
#include "sivsim/integrator.hpp"
#include "sivsim/level_system.hpp"
#include "sivsim/pulses.hpp"

namespace sivsim {

/// Sum over excited levels of population times radiative rate (1/ns).
double fluorescence_observable(const DensityMatrix& rho, const LevelSystem& system);

/// (rho_f22 - rho_i22) / (1 - 2 rho_i22). Requires rho_i22 in [0, 0.5).
double transfer_efficiency(double rho_i22, double rho_f22);

/// Excitation-induced dephasing that scales linearly with the total pulse
/// area of a sequence, anchored at `reference_ghz` for `reference_area_rad`.
double scaled_eid_ghz(double total_area_rad, double reference_ghz, double reference_area_rad);

// ---------------------------------------------------------------------------
// Ramsey and Hahn echo

struct ResonantPulses {
  Transition transition = Transition::C;
  double fwhm_ns = 0.012;
  double detuning_ghz = 0.0;
  double half_pi_area_rad = kHalfPi;
  double pi_area_rad = 2.0 * kHalfPi;

  static constexpr double kHalfPi = 1.5707963267948966;
};

struct CoherenceScan {
  EnsembleSpec ensemble;
  ResonantPulses pulses;
  /// Ramsey: pulse separation. Echo: spacing of the pi pulse from each
  /// pi/2 pulse, so the readout happens at 2 tau.
  std::vector<double> tau_ns;
  /// Extra excited-level dephasing linewidth, active from the start of the
  /// first pulse window to the end of the last one.
  double eid_ghz = 0.0;
  DecayModel model = DecayModel::kGaussianTimesExponential;
  /// Initial state; defaults to the thermal ground state of the system.
  std::optional<DensityMatrix> initial_state;
  double temperature_k = 5.0;
  EvolveOptions evolve{};
  int threads = 1;
};

/// Fringe envelopes. upper / lower are the excited-level populations with
/// the last pulse at relative phase 0 and pi (max / min); visibility is
/// their difference divided by the initial population of the driven
/// ground level.
struct CoherenceResult {
  std::vector<double> tau_ns;
  std::vector<double> upper;
  std::vector<double> lower;
  std::vector<double> visibility;
  DecayFit fit;
  bool flagged = false;
  std::vector<std::string> warnings;
};

CoherenceResult run_ramsey(const LevelSystem& system, const CoherenceScan& scan);
CoherenceResult run_hahn_echo(const LevelSystem& system, const CoherenceScan& scan);

// ---------------------------------------------------------------------------
// Optical pumping and Raman transfer

struct PumpSettings {
  Transition transition = Transition::D;
  double rabi = 0.0;  // rad/ns
  double duration_ns = 100.0;
  double detuning_ghz = 0.0;
  /// Readout time after the end of the pump.
  double readout_delay_ns = 6.0;
};

struct PumpScan {
  EnsembleSpec ensemble;
  PumpSettings pump;
  double temperature_k = 5.0;
  /// Samples of the rho22 / fluorescence traces over [0, end + delay].
  int trace_samples = 201;
  EvolveOptions evolve{};
  int threads = 1;
};

struct PumpResult {
  std::vector<double> times_ns;
  std::vector<double> rho22;
  std::vector<double> fluorescence;
  double rho22_initial = 0.0;
  double rho22_pump_end = 0.0;
  double rho22_readout = 0.0;
};

PumpResult run_optical_pumping(const LevelSystem& system, const PumpScan& scan);

/// Pump Rabi frequency for which rho22 at the readout equals `target`, by
/// bisection in log(Omega) over [lo, hi].
double calibrate_pump_rabi(const LevelSystem& system, const PumpScan& scan, double target_rho22,
                           double lo = 0.01, double hi = 100.0, double rel_tol = 1e-4);

struct StirapScan {
  EnsembleSpec ensemble;
  PumpSettings pump;
  RamanPairParams raman;
  double temperature_k = 5.0;
  /// Switch off every rate during the Raman segment.
  bool coherent_raman = false;
  int trace_samples = 101;
  EvolveOptions evolve{};
  int threads = 1;
};

struct StirapResult {
  double rho22_start = 0.0;    // at the start of the Raman window
  /// Reference without Raman fields, evolved to the end of the window. The
  /// efficiency uses it as the initial population so that ground-state
  /// relaxation during the window is not counted as transfer.
  double rho22_initial = 0.0;
  double rho22_final = 0.0;    // at the end of the window
  double efficiency = 0.0;
  double raman_start_ns = 0.0;
  double raman_stop_ns = 0.0;
  /// Populations over the Raman window.
  std::vector<double> times_ns;
  std::vector<double> rho11, rho22, rho_excited;
  std::vector<std::string> warnings;
};

/// Pump, then a Raman pair starting `readout_delay_ns` after the pump.
/// The per-node states at the Raman start are computed once and reused by
/// every run() call, so sweeps over the Raman parameters only integrate
/// the short Raman segment. The pump drives and the Raman pair share the
/// relative frame of the coherences that survive the pump, so restarting
/// in the combined frame is exact.
class StirapSimulator {
 public:
  StirapSimulator(const LevelSystem& system, const StirapScan& scan);

  StirapResult run(const RamanPairParams& raman, bool coherent_raman) const;
  StirapResult run() const { return run(scan_.raman, scan_.coherent_raman); }

  double rho22_start() const { return rho22_start_; }
  double raman_start_ns() const { return raman_start_ns_; }
  const StirapScan& scan() const { return scan_; }

 private:
  LevelSystem system_;
  StirapScan scan_;
  std::vector<DetuningNode> nodes_;
  std::vector<DensityMatrix> pumped_;
  double raman_start_ns_ = 0.0;
  double rho22_start_ = 0.0;
};

StirapResult run_stirap(const LevelSystem& system, const StirapScan& scan);

/// Equal signal and control area maximizing the transfer, by golden-section
/// search over [0, max_area].
double calibrate_raman_area_max(const StirapSimulator& sim, bool coherent_raman, double max_area = 30.0);

/// Equal signal and control area on the rising branch for which the
/// transfer efficiency equals `target_eta`.
double calibrate_raman_area(const StirapSimulator& sim, double target_eta, bool coherent_raman,
                            double max_area = 30.0);

// ---------------------------------------------------------------------------
// Photoluminescence-excitation spectrum

struct PleLine {
  std::string label;  // e.g. "C-28"
  double center_ghz;
  double amplitude;
};

/// Twelve zero-phonon lines: A, B, C, D for the three stable silicon
/// isotopes, centred on line C of the majority isotope. Amplitudes are
/// relative line strengths times the natural isotope abundance.
std::vector<PleLine> ple_line_layout(const LevelSystem& system);

struct SyntheticSpectrum {
  double fwhm_ghz = 10.0;
  double f_min_ghz = -120.0;
  double f_max_ghz = 500.0;
  int points = 1241;
  /// Gaussian noise relative to the strongest line.
  double noise = 0.0;
  std::uint64_t seed = 0;
};

void synthetic_ple_spectrum(const LevelSystem& system, const SyntheticSpectrum& params, std::vector<double>& f_ghz,
                            std::vector<double>& intensity);

}  // namespace sivsim
