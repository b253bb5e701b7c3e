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

#include "sivsim/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sivsim/units.hpp"

namespace sivsim {
namespace {

// Half-widths of the support windows, in units of the FWHM. The truncated
// tails carry less than 1e-11 of the area.
constexpr double kGaussianHalfWindowFwhm = 3.0;
constexpr double kSechHalfWindowTau = 30.0;

const double kSechFwhmPerTau = 2.0 * std::acosh(2.0);

double gaussian_area_per_peak(double fwhm_ns) {
  return fwhm_ns * std::sqrt(kPi / (4.0 * std::log(2.0)));
}

}  // namespace

DriveField::DriveField(Transition transition, EnvelopeShape shape, double peak_rabi, double center_ns,
                       double width_ns, double carrier_detuning_ghz, double phase_rad)
    : transition_(transition),
      shape_(shape),
      peak_rabi_(peak_rabi),
      center_ns_(center_ns),
      width_ns_(width_ns),
      carrier_detuning_ghz_(carrier_detuning_ghz),
      phase_rad_(phase_rad) {
  if (!(width_ns > 0.0) || !std::isfinite(width_ns)) throw std::invalid_argument("pulse width must be > 0");
  if (!(peak_rabi >= 0.0) || !std::isfinite(peak_rabi))
    throw std::invalid_argument("peak Rabi frequency must be finite and >= 0");
  if (!std::isfinite(center_ns) || !std::isfinite(carrier_detuning_ghz) || !std::isfinite(phase_rad))
    throw std::invalid_argument("pulse parameters must be finite");
  double half = 0.0;
  switch (shape) {
    case EnvelopeShape::kSquare: half = 0.5 * width_ns; break;
    case EnvelopeShape::kGaussian: half = kGaussianHalfWindowFwhm * width_ns; break;
    case EnvelopeShape::kSech: half = kSechHalfWindowTau * width_ns / kSechFwhmPerTau; break;
  }
  window_start_ns_ = center_ns - half;
  window_stop_ns_ = center_ns + half;
}

double DriveField::rabi(double t) const {
  if (t < window_start_ns_ || t > window_stop_ns_) return 0.0;
  switch (shape_) {
    case EnvelopeShape::kSquare:
      return peak_rabi_;
    case EnvelopeShape::kGaussian: {
      const double x = (t - center_ns_) / width_ns_;
      return peak_rabi_ * std::exp(-4.0 * std::log(2.0) * x * x);
    }
    case EnvelopeShape::kSech: {
      const double x = (t - center_ns_) * kSechFwhmPerTau / width_ns_;
      return peak_rabi_ / std::cosh(x);
    }
  }
  return 0.0;
}

DriveField DriveField::shifted(double dt) const {
  DriveField d = *this;
  d.center_ns_ += dt;
  d.window_start_ns_ += dt;
  d.window_stop_ns_ += dt;
  return d;
}

DriveField DriveField::with_phase(double phase_rad) const {
  DriveField d = *this;
  d.phase_rad_ = phase_rad;
  return d;
}

PulseTimeline::PulseTimeline(std::vector<DriveField> drives, std::vector<ExcessDephasing> dephasing) {
  for (const auto& d : drives) add(d);
  for (const auto& w : dephasing) add_dephasing(w);
}

void PulseTimeline::check_overlap(const DriveField& drive) const {
  for (const auto& other : drives_) {
    if (other.transition() != drive.transition()) continue;
    if (other.carrier_detuning_ghz() == drive.carrier_detuning_ghz()) continue;
    const bool overlap = drive.window_start_ns() < other.window_stop_ns() &&
                         other.window_start_ns() < drive.window_stop_ns();
    if (overlap) {
      std::ostringstream os;
      os << "drives on transition " << to_string(drive.transition())
         << " with different carriers overlap in time";
      throw std::invalid_argument(os.str());
    }
  }
}

void PulseTimeline::add(const DriveField& drive) {
  check_overlap(drive);
  drives_.push_back(drive);
}

void PulseTimeline::add(const std::vector<DriveField>& drives) {
  for (const auto& d : drives) add(d);
}

void PulseTimeline::add_dephasing(const ExcessDephasing& w) {
  if (!(w.stop_ns >= w.start_ns)) throw std::invalid_argument("dephasing window must have stop >= start");
  if (!(w.linewidth_ghz >= 0.0)) throw std::invalid_argument("dephasing linewidth must be >= 0");
  dephasing_.push_back(w);
}

double PulseTimeline::start_ns() const {
  if (drives_.empty() && dephasing_.empty()) return 0.0;
  double s = std::numeric_limits<double>::infinity();
  for (const auto& d : drives_) s = std::min(s, d.window_start_ns());
  for (const auto& w : dephasing_) s = std::min(s, w.start_ns);
  return s;
}

double PulseTimeline::stop_ns() const {
  if (drives_.empty() && dephasing_.empty()) return 0.0;
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& d : drives_) s = std::max(s, d.window_stop_ns());
  for (const auto& w : dephasing_) s = std::max(s, w.stop_ns);
  return s;
}

std::vector<double> PulseTimeline::breakpoints() const {
  std::vector<double> pts;
  for (const auto& d : drives_) {
    pts.push_back(d.window_start_ns());
    pts.push_back(d.window_stop_ns());
  }
  for (const auto& w : dephasing_) {
    pts.push_back(w.start_ns);
    pts.push_back(w.stop_ns);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double PulseTimeline::excess_dephasing_rate(double t) const {
  double rate = 0.0;
  for (const auto& w : dephasing_)
    if (t >= w.start_ns && t < w.stop_ns) rate += kTwoPi * w.linewidth_ghz;
  return rate;
}

PulseTimeline PulseTimeline::shifted(double dt) const {
  PulseTimeline out;
  for (const auto& d : drives_) out.drives_.push_back(d.shifted(dt));
  for (auto w : dephasing_) {
    w.start_ns += dt;
    w.stop_ns += dt;
    out.dephasing_.push_back(w);
  }
  return out;
}

double gaussian_peak_rabi(double area_rad, double fwhm_ns) {
  if (!(fwhm_ns > 0.0)) throw std::invalid_argument("fwhm must be > 0");
  return area_rad / gaussian_area_per_peak(fwhm_ns);
}

DriveField gaussian_pulse(double area_rad, double fwhm_ns, double center_ns, Transition transition,
                          double detuning_ghz, double phase_rad) {
  if (!(area_rad >= 0.0)) throw std::invalid_argument("pulse area must be >= 0");
  return DriveField(transition, EnvelopeShape::kGaussian, gaussian_peak_rabi(area_rad, fwhm_ns), center_ns,
                    fwhm_ns, detuning_ghz, phase_rad);
}

DriveField sech_pulse(double area_rad, double fwhm_ns, double center_ns, Transition transition,
                      double detuning_ghz, double phase_rad) {
  if (!(area_rad >= 0.0)) throw std::invalid_argument("pulse area must be >= 0");
  if (!(fwhm_ns > 0.0)) throw std::invalid_argument("fwhm must be > 0");
  const double tau = fwhm_ns / kSechFwhmPerTau;
  return DriveField(transition, EnvelopeShape::kSech, area_rad / (kPi * tau), center_ns, fwhm_ns,
                    detuning_ghz, phase_rad);
}

DriveField square_pulse(double peak_rabi, double duration_ns, double start_ns, Transition transition,
                        double detuning_ghz, double phase_rad) {
  if (!(duration_ns > 0.0)) throw std::invalid_argument("pulse duration must be > 0");
  return DriveField(transition, EnvelopeShape::kSquare, peak_rabi, start_ns + 0.5 * duration_ns, duration_ns,
                    detuning_ghz, phase_rad);
}

double pulse_area(const DriveField& drive) {
  if (drive.peak_rabi() == 0.0) return 0.0;
  auto f = [&](double t) { return drive.rabi(t); };
  using boost::math::quadrature::gauss_kronrod;
  // Split at the centre so the peak is never a lone interior point.
  const double a = gauss_kronrod<double, 31>::integrate(f, drive.window_start_ns(), drive.center_ns(), 20, 1e-13);
  const double b = gauss_kronrod<double, 31>::integrate(f, drive.center_ns(), drive.window_stop_ns(), 20, 1e-13);
  return a + b;
}

std::vector<DriveField> raman_pair(const RamanPairParams& p, double signal_center_ns) {
  std::vector<DriveField> out;
  if (p.signal_area_rad > 0.0)
    out.push_back(gaussian_pulse(p.signal_area_rad, p.fwhm_ns, signal_center_ns, Transition::A,
                                 p.common_detuning_ghz, p.signal_phase_rad));
  if (p.control_area_rad > 0.0)
    out.push_back(gaussian_pulse(p.control_area_rad, p.fwhm_ns, signal_center_ns + p.relative_delay_ns,
                                 Transition::B, p.common_detuning_ghz + p.two_photon_detuning_ghz,
                                 p.control_phase_rad));
  return out;
}

std::optional<std::string> raman_detuning_warning(double common_detuning_ghz, double inhomogeneous_fwhm_ghz) {
  if (std::abs(common_detuning_ghz) < 5.0 * inhomogeneous_fwhm_ghz) {
    std::ostringstream os;
    os << "Raman common detuning " << common_detuning_ghz << " GHz is within 5x the inhomogeneous FWHM ("
       << inhomogeneous_fwhm_ghz << " GHz); single-photon absorption is not negligible";
    return os.str();
  }
  return std::nullopt;
}

}  // namespace sivsim
