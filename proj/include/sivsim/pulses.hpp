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

#include <optional>
#include <string>
#include <vector>

#include "sivsim/level_system.hpp"

namespace sivsim {

/// Envelope families. Adding a shape means extending EnvelopeShape,
/// DriveField::rabi and the window/area rules in pulses.cpp.
enum class EnvelopeShape { kSquare, kGaussian, kSech };

/// One optical drive in the rotating-wave picture. The envelope is real and
/// nonnegative; the optical phase lives in phase_rad. The envelope vanishes
/// outside [window_start_ns, window_stop_ns].
class DriveField {
 public:
  DriveField(Transition transition, EnvelopeShape shape, double peak_rabi, double center_ns,
             double width_ns, double carrier_detuning_ghz, double phase_rad);

  Transition transition() const { return transition_; }
  EnvelopeShape shape() const { return shape_; }
  double peak_rabi() const { return peak_rabi_; }
  double center_ns() const { return center_ns_; }
  /// FWHM for Gaussian and sech envelopes, full duration for square ones.
  double width_ns() const { return width_ns_; }
  double carrier_detuning_ghz() const { return carrier_detuning_ghz_; }
  double phase_rad() const { return phase_rad_; }
  double window_start_ns() const { return window_start_ns_; }
  double window_stop_ns() const { return window_stop_ns_; }

  /// Rabi frequency Omega(t) in rad/ns.
  double rabi(double t_ns) const;

  DriveField shifted(double dt_ns) const;
  DriveField with_phase(double phase_rad) const;

 private:
  Transition transition_;
  EnvelopeShape shape_;
  double peak_rabi_;
  double center_ns_;
  double width_ns_;
  double carrier_detuning_ghz_;
  double phase_rad_;
  double window_start_ns_;
  double window_stop_ns_;
};

/// Extra pure dephasing of both excited levels, active in a time window.
/// A linewidth of w GHz adds 2*pi*w to Gamma_33 and Gamma_44, i.e. an
/// optical coherence decay rate of pi*w.
struct ExcessDephasing {
  double start_ns = 0.0;
  double stop_ns = 0.0;
  double linewidth_ghz = 0.0;
};

class PulseTimeline {
 public:
  PulseTimeline() = default;
  explicit PulseTimeline(std::vector<DriveField> drives, std::vector<ExcessDephasing> dephasing = {});

  void add(const DriveField& drive);
  void add(const std::vector<DriveField>& drives);
  void add_dephasing(const ExcessDephasing& window);

  const std::vector<DriveField>& drives() const { return drives_; }
  const std::vector<ExcessDephasing>& dephasing() const { return dephasing_; }
  bool empty() const { return drives_.empty(); }

  /// Earliest window start / latest window stop over drives and dephasing
  /// windows. Zero for an empty timeline.
  double start_ns() const;
  double stop_ns() const;
  double total_span_ns() const { return stop_ns() - start_ns(); }

  /// Sorted, de-duplicated window edges; the integrator restarts there.
  std::vector<double> breakpoints() const;

  /// Extra excited-level dephasing rate (1/ns) active at t.
  double excess_dephasing_rate(double t_ns) const;

  PulseTimeline shifted(double dt_ns) const;

 private:
  void check_overlap(const DriveField& drive) const;

  std::vector<DriveField> drives_;
  std::vector<ExcessDephasing> dephasing_;
};

/// Omega(t) = Omega0 exp(-4 ln2 (t - center)^2 / fwhm^2) with integral `area`.
DriveField gaussian_pulse(double area_rad, double fwhm_ns, double center_ns, Transition transition,
                          double detuning_ghz = 0.0, double phase_rad = 0.0);

/// Omega(t) = Omega0 sech((t - center) / tau), fwhm = 2 acosh(2) tau.
DriveField sech_pulse(double area_rad, double fwhm_ns, double center_ns, Transition transition,
                      double detuning_ghz = 0.0, double phase_rad = 0.0);

/// Constant Omega on [start, start + duration].
DriveField square_pulse(double peak_rabi, double duration_ns, double start_ns, Transition transition,
                        double detuning_ghz = 0.0, double phase_rad = 0.0);

/// Peak Rabi frequency of a Gaussian envelope with the given area.
double gaussian_peak_rabi(double area_rad, double fwhm_ns);

/// Integral of Omega(t) by adaptive Gauss-Kronrod quadrature over the window.
double pulse_area(const DriveField& drive);

struct RamanPairParams {
  double common_detuning_ghz = 70.0;
  double two_photon_detuning_ghz = 0.0;
  /// Control centre minus signal centre.
  double relative_delay_ns = 0.0;
  double signal_area_rad = 0.0;
  double control_area_rad = 0.0;
  double fwhm_ns = 0.05;
  double signal_phase_rad = 0.0;
  double control_phase_rad = 0.0;
};

/// Signal on A (|1>-|4>) with carrier detuning Delta and control on B
/// (|2>-|4>) with carrier detuning Delta + delta2, both Gaussian. Zero-area
/// members are omitted.
std::vector<DriveField> raman_pair(const RamanPairParams& params, double signal_center_ns);

/// Warning text when the common detuning is not well outside the
/// inhomogeneous line (|Delta| < 5 FWHM).
std::optional<std::string> raman_detuning_warning(double common_detuning_ghz,
                                                  double inhomogeneous_fwhm_ghz);

}  // namespace sivsim
