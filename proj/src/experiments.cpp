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

#include "sivsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sivsim/units.hpp"

namespace sivsim {

double fluorescence_observable(const DensityMatrix& rho, const LevelSystem& system) {
  double s = 0.0;
  for (int e = kExcited3; e < kLevels; ++e) s += population(rho, e) * system.radiative_rate(e);
  return s;
}

double transfer_efficiency(double rho_i22, double rho_f22) {
  if (!(rho_i22 >= 0.0 && rho_i22 < 0.5))
    throw std::invalid_argument("transfer efficiency is undefined unless 0 <= rho_i22 < 0.5");
  return (rho_f22 - rho_i22) / (1.0 - 2.0 * rho_i22);
}

double scaled_eid_ghz(double total_area_rad, double reference_ghz, double reference_area_rad) {
  if (!(reference_area_rad > 0.0)) throw std::invalid_argument("reference pulse area must be > 0");
  return reference_ghz * total_area_rad / reference_area_rad;
}

namespace {

DensityMatrix initial_state_of(const LevelSystem& system, const std::optional<DensityMatrix>& given,
                               double temperature_k) {
  if (given) return *given;
  return thermal_ground_state(temperature_k, system.ground_splitting_ghz());
}

// Per-(tau, phase) timelines of a coherence scan.
PulseTimeline ramsey_timeline(const ResonantPulses& p, double tau, double phase, double eid_ghz) {
  PulseTimeline tl;
  tl.add(gaussian_pulse(p.half_pi_area_rad, p.fwhm_ns, 0.0, p.transition, p.detuning_ghz, 0.0));
  tl.add(gaussian_pulse(p.half_pi_area_rad, p.fwhm_ns, tau, p.transition, p.detuning_ghz, phase));
  if (eid_ghz > 0.0) tl.add_dephasing({tl.start_ns(), tl.stop_ns(), eid_ghz});
  return tl;
}

PulseTimeline echo_timeline(const ResonantPulses& p, double tau, double phase, double eid_ghz) {
  PulseTimeline tl;
  tl.add(gaussian_pulse(p.half_pi_area_rad, p.fwhm_ns, 0.0, p.transition, p.detuning_ghz, 0.0));
  tl.add(gaussian_pulse(p.pi_area_rad, p.fwhm_ns, tau, p.transition, p.detuning_ghz, 0.0));
  tl.add(gaussian_pulse(p.half_pi_area_rad, p.fwhm_ns, 2.0 * tau, p.transition, p.detuning_ghz, phase));
  if (eid_ghz > 0.0) tl.add_dephasing({tl.start_ns(), tl.stop_ns(), eid_ghz});
  return tl;
}

using TimelineFactory = PulseTimeline (*)(const ResonantPulses&, double, double, double);

CoherenceResult coherence_scan(const LevelSystem& system, const CoherenceScan& scan, TimelineFactory make) {
  if (scan.tau_ns.empty()) throw std::invalid_argument("tau grid is empty");
  for (std::size_t i = 0; i < scan.tau_ns.size(); ++i) {
    if (!(scan.tau_ns[i] > 0.0)) throw std::invalid_argument("tau values must be > 0");
    if (i > 0 && !(scan.tau_ns[i] > scan.tau_ns[i - 1])) throw std::invalid_argument("tau grid must be ascending");
  }
  if (scan.eid_ghz < 0.0) throw std::invalid_argument("eid must be >= 0");

  const auto nodes = detuning_nodes(scan.ensemble);
  const DensityMatrix rho0 = initial_state_of(system, scan.initial_state, scan.temperature_k);
  const auto [ground, excited] = levels_of(scan.pulses.transition);
  const double available = population(rho0, ground);
  if (!(available > 0.0)) throw std::invalid_argument("driven ground level is empty in the initial state");

  const std::size_t n_tau = scan.tau_ns.size(), n_nodes = nodes.size();
  const std::size_t jobs = n_tau * 2 * n_nodes;
  std::vector<double> excited_pop(jobs);
  parallel_for(jobs, scan.threads, [&](std::size_t job) {
    const std::size_t node = job % n_nodes;
    const std::size_t phase_idx = (job / n_nodes) % 2;
    const std::size_t tau_idx = job / (2 * n_nodes);
    try {
      const auto tl = make(scan.pulses, scan.tau_ns[tau_idx], phase_idx == 0 ? 0.0 : kPi, scan.eid_ghz);
      const auto traj = evolve(rho0, system, tl, tl.start_ns(), tl.stop_ns(), scan.evolve, nodes[node].detuning_ghz);
      excited_pop[job] = population(traj.final_state(), excited);
    } catch (...) {
      rethrow_for_node(node, nodes[node].detuning_ghz);
    }
  });

  CoherenceResult out;
  out.tau_ns = scan.tau_ns;
  for (std::size_t k = 0; k < n_tau; ++k) {
    double p[2] = {0.0, 0.0};
    for (std::size_t ph = 0; ph < 2; ++ph)
      for (std::size_t i = 0; i < n_nodes; ++i) p[ph] += nodes[i].weight * excited_pop[(k * 2 + ph) * n_nodes + i];
    out.upper.push_back(std::max(p[0], p[1]));
    out.lower.push_back(std::min(p[0], p[1]));
    out.visibility.push_back(std::abs(p[0] - p[1]) / available);
  }
  if (n_tau >= 5) {
    out.fit = fit_decay(out.tau_ns, out.visibility, scan.model);
  } else {
    out.fit.flagged = true;
    out.fit.residual_norm = std::numeric_limits<double>::infinity();
    out.fit.message = "fewer than 5 delays; no fit";
  }
  out.flagged = out.fit.flagged;
  if (out.fit.flagged) out.warnings.push_back("decay fit flagged: " + out.fit.message);
  if (scan.tau_ns.front() < 2.0 * scan.pulses.fwhm_ns)
    out.warnings.push_back("shortest delay is below two pulse widths; pulses overlap");
  return out;
}

constexpr double kEnsembleFidTolerance = 1e-2;

}  // namespace

CoherenceResult run_ramsey(const LevelSystem& system, const CoherenceScan& scan) {
  auto out = coherence_scan(system, scan, &ramsey_timeline);
  // How well the sampled ensemble reproduces the continuous Gaussian
  // free-induction decay on these delays; beyond ~1 % the scan shows node
  // revivals or sampling noise rather than dephasing.
  const auto nodes = detuning_nodes(scan.ensemble);
  const double sigma = scan.ensemble.sigma_ghz();
  double worst = 0.0, worst_tau = 0.0;
  for (double tau : scan.tau_ns) {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight * std::cos(kTwoPi * n.detuning_ghz * tau);
    const double x = kTwoPi * sigma * tau;
    const double err = std::abs(s - std::exp(-0.5 * x * x));
    if (err > worst) worst = err, worst_tau = tau;
  }
  if (worst > kEnsembleFidTolerance) {
    std::ostringstream os;
    os << "the " << scan.ensemble.n_emitters << "-emitter ensemble misses the Gaussian free-induction decay by "
       << worst << " at " << worst_tau << " ns; expect revivals or sampling noise";
    out.warnings.push_back(os.str());
  }
  return out;
}

CoherenceResult run_hahn_echo(const LevelSystem& system, const CoherenceScan& scan) {
  return coherence_scan(system, scan, &echo_timeline);
}

// ---------------------------------------------------------------------------

namespace {

void check_pump(const PumpSettings& p) {
  if (!(p.duration_ns > 0.0)) throw std::invalid_argument("pump duration must be > 0");
  if (!(p.readout_delay_ns >= 0.0)) throw std::invalid_argument("readout delay must be >= 0");
  if (!(p.rabi >= 0.0)) throw std::invalid_argument("pump Rabi frequency must be >= 0");
}

PulseTimeline pump_timeline(const PumpSettings& p) {
  PulseTimeline tl;
  tl.add(square_pulse(p.rabi, p.duration_ns, 0.0, p.transition, p.detuning_ghz, 0.0));
  return tl;
}

std::vector<double> pump_samples(const PumpSettings& p, int n) {
  const double end = p.duration_ns + p.readout_delay_ns;
  std::vector<double> s;
  for (int i = 0; i < n; ++i) s.push_back(n > 1 ? end * i / (n - 1) : end);
  s.push_back(0.0);
  s.push_back(p.duration_ns);
  s.push_back(end);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace

PumpResult run_optical_pumping(const LevelSystem& system, const PumpScan& scan) {
  check_pump(scan.pump);
  const auto tl = pump_timeline(scan.pump);
  const DensityMatrix rho0 = thermal_ground_state(scan.temperature_k, system.ground_splitting_ghz());
  EvolveOptions opt = scan.evolve;
  opt.sample_times = pump_samples(scan.pump, std::max(scan.trace_samples, 2));
  const double end = scan.pump.duration_ns + scan.pump.readout_delay_ns;

  const auto traces = ensemble_run(
      system, tl, scan.ensemble, rho0, 0.0, end,
      {{"rho22", [](const DensityMatrix& r) { return population(r, kGround2); }},
       {"fluorescence", [&](const DensityMatrix& r) { return fluorescence_observable(r, system); }}},
      opt, scan.threads);

  PumpResult out;
  out.times_ns = traces.times;
  out.rho22 = traces.values[0];
  out.fluorescence = traces.values[1];
  auto at = [&](double t) {
    const auto it = std::find(out.times_ns.begin(), out.times_ns.end(), t);
    return out.rho22[static_cast<std::size_t>(it - out.times_ns.begin())];
  };
  out.rho22_initial = out.rho22.front();
  out.rho22_pump_end = at(scan.pump.duration_ns);
  out.rho22_readout = at(end);
  return out;
}

double calibrate_pump_rabi(const LevelSystem& system, const PumpScan& scan, double target, double lo, double hi,
                           double rel_tol) {
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("invalid pump calibration bracket");
  PumpScan s = scan;
  s.trace_samples = 2;
  auto residual = [&](double rabi) {
    s.pump.rabi = rabi;
    return run_optical_pumping(system, s).rho22_readout - target;
  };
  double f_lo = residual(lo), f_hi = residual(hi);
  if (f_lo * f_hi > 0.0) {
    std::ostringstream os;
    os << "target rho22 = " << target << " is not bracketed by pump Rabi frequencies [" << lo << ", " << hi << "]";
    throw std::invalid_argument(os.str());
  }
  double a = std::log(lo), b = std::log(hi);
  while (b - a > rel_tol) {
    const double mid = 0.5 * (a + b);
    const double f_mid = residual(std::exp(mid));
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      a = mid;
      f_lo = f_mid;
    } else {
      b = mid;
    }
  }
  return std::exp(0.5 * (a + b));
}

// ---------------------------------------------------------------------------

StirapSimulator::StirapSimulator(const LevelSystem& system, const StirapScan& scan)
    : system_(system), scan_(scan), nodes_(detuning_nodes(scan.ensemble)) {
  check_pump(scan.pump);
  raman_start_ns_ = scan.pump.duration_ns + scan.pump.readout_delay_ns;
  const auto tl = pump_timeline(scan.pump);
  const DensityMatrix rho0 = thermal_ground_state(scan.temperature_k, system.ground_splitting_ghz());
  pumped_.resize(nodes_.size());
  EvolveOptions opt = scan.evolve;
  opt.sample_times.clear();
  parallel_for(nodes_.size(), scan.threads, [&](std::size_t i) {
    try {
      pumped_[i] = evolve(rho0, system_, tl, 0.0, raman_start_ns_, opt, nodes_[i].detuning_ghz).final_state();
    } catch (...) {
      rethrow_for_node(i, nodes_[i].detuning_ghz);
    }
  });
  for (std::size_t i = 0; i < nodes_.size(); ++i) rho22_start_ += nodes_[i].weight * population(pumped_[i], kGround2);
}

StirapResult StirapSimulator::run(const RamanPairParams& raman, bool coherent_raman) const {
  if (!(raman.fwhm_ns > 0.0)) throw std::invalid_argument("Raman pulse FWHM must be > 0");
  if (!(raman.signal_area_rad >= 0.0 && raman.control_area_rad >= 0.0))
    throw std::invalid_argument("Raman pulse areas must be >= 0");

  // The window opens at the Raman start and spans both pulses.
  const double half = 3.0 * raman.fwhm_ns;
  const double signal_center = raman_start_ns_ + half + std::max(0.0, -raman.relative_delay_ns);
  const double stop = raman_start_ns_ + 2.0 * half + std::abs(raman.relative_delay_ns);
  PulseTimeline tl;
  tl.add(raman_pair(raman, signal_center));

  const LevelSystem sys = coherent_raman ? system_.without_decoherence() : system_;
  EvolveOptions opt = scan_.evolve;
  const int n = std::max(scan_.trace_samples, 2);
  opt.sample_times.clear();
  for (int i = 0; i < n; ++i) opt.sample_times.push_back(raman_start_ns_ + (stop - raman_start_ns_) * i / (n - 1));
  opt.sample_times.back() = stop;

  const std::size_t m = opt.sample_times.size();
  EvolveOptions ref_opt = scan_.evolve;
  ref_opt.sample_times.clear();
  const PulseTimeline no_drives;
  std::vector<std::vector<double>> per_node(nodes_.size());
  parallel_for(nodes_.size(), scan_.threads, [&](std::size_t i) {
    try {
      const auto traj = evolve(pumped_[i], sys, tl, raman_start_ns_, stop, opt, nodes_[i].detuning_ghz);
      const auto ref = evolve(pumped_[i], sys, no_drives, raman_start_ns_, stop, ref_opt, nodes_[i].detuning_ghz);
      auto& v = per_node[i];
      v.resize(3 * m + 1);
      v[3 * m] = population(ref.final_state(), kGround2);
      for (std::size_t k = 0; k < m; ++k) {
        const auto& r = traj.states[k];
        v[k] = population(r, kGround1);
        v[m + k] = population(r, kGround2);
        v[2 * m + k] = population(r, kExcited3) + population(r, kExcited4);
      }
    } catch (...) {
      rethrow_for_node(i, nodes_[i].detuning_ghz);
    }
  });

  StirapResult out;
  out.times_ns = opt.sample_times;
  out.rho11.assign(m, 0.0);
  out.rho22.assign(m, 0.0);
  out.rho_excited.assign(m, 0.0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double w = nodes_[i].weight;
    out.rho22_initial += w * per_node[i][3 * m];
    for (std::size_t k = 0; k < m; ++k) {
      out.rho11[k] += w * per_node[i][k];
      out.rho22[k] += w * per_node[i][m + k];
      out.rho_excited[k] += w * per_node[i][2 * m + k];
    }
  }
  out.raman_start_ns = raman_start_ns_;
  out.raman_stop_ns = stop;
  out.rho22_start = rho22_start_;
  out.rho22_final = out.rho22.back();
  out.efficiency = transfer_efficiency(out.rho22_initial, out.rho22_final);
  if (auto w = raman_detuning_warning(raman.common_detuning_ghz, scan_.ensemble.fwhm_ghz)) out.warnings.push_back(*w);
  return out;
}

StirapResult run_stirap(const LevelSystem& system, const StirapScan& scan) {
  return StirapSimulator(system, scan).run();
}

namespace {

double efficiency_at(const StirapSimulator& sim, double area, bool coherent) {
  RamanPairParams p = sim.scan().raman;
  p.signal_area_rad = p.control_area_rad = area;
  return sim.run(p, coherent).efficiency;
}

}  // namespace

double calibrate_raman_area_max(const StirapSimulator& sim, bool coherent, double max_area) {
  if (!(max_area > 0.0)) throw std::invalid_argument("max Raman area must be > 0");
  // Coarse scan, then golden-section refinement around the first
  // pronounced maximum (the first full Raman rotation).
  constexpr int kCoarse = 31;
  std::vector<double> area(kCoarse), eta(kCoarse);
  for (int i = 0; i < kCoarse; ++i) {
    area[i] = max_area * i / (kCoarse - 1);
    eta[i] = efficiency_at(sim, area[i], coherent);
  }
  const double best = *std::max_element(eta.begin(), eta.end());
  int pick = static_cast<int>(std::max_element(eta.begin(), eta.end()) - eta.begin());
  for (int i = 1; i + 1 < kCoarse; ++i) {
    if (eta[i] >= eta[i - 1] && eta[i] >= eta[i + 1] && eta[i] > 0.5 * best) {
      pick = i;
      break;
    }
  }
  double a = area[std::max(pick - 1, 0)], b = area[std::min(pick + 1, kCoarse - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = efficiency_at(sim, x1, coherent), f2 = efficiency_at(sim, x2, coherent);
  while (b - a > 1e-4 * max_area) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = efficiency_at(sim, x2, coherent);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = efficiency_at(sim, x1, coherent);
    }
  }
  return 0.5 * (a + b);
}

double calibrate_raman_area(const StirapSimulator& sim, double target_eta, bool coherent, double max_area) {
  const double peak = calibrate_raman_area_max(sim, coherent, max_area);
  const double eta_peak = efficiency_at(sim, peak, coherent);
  if (!(target_eta >= 0.0 && target_eta <= eta_peak)) {
    std::ostringstream os;
    os << "target efficiency " << target_eta << " exceeds the reachable maximum " << eta_peak;
    throw std::invalid_argument(os.str());
  }
  double a = 0.0, b = peak;
  while (b - a > 1e-6 * peak) {
    const double mid = 0.5 * (a + b);
    (efficiency_at(sim, mid, coherent) < target_eta ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------

std::vector<PleLine> ple_line_layout(const LevelSystem& system) {
  struct Isotope {
    const char* name;
    double shift_ghz;
    double abundance;
  };
  // Heavier silicon isotopes shift the zero-phonon line to higher energy.
  static constexpr Isotope kIsotopes[] = {{"28", 0.0, 0.922}, {"29", 87.0, 0.047}, {"30", 170.0, 0.031}};
  struct Line {
    Transition tr;
    double strength;
  };
  static constexpr Line kLines[] = {
      {Transition::A, 0.6}, {Transition::B, 0.35}, {Transition::C, 1.0}, {Transition::D, 0.55}};
  std::vector<PleLine> out;
  for (const auto& iso : kIsotopes) {
    for (const auto& l : kLines) {
      const auto [g, e] = levels_of(l.tr);
      const double offset = system.level_energy_ghz(e) - system.level_energy_ghz(g);
      out.push_back({std::string(to_string(l.tr)) + "-" + iso.name, offset + iso.shift_ghz, l.strength * iso.abundance});
    }
  }
  std::sort(out.begin(), out.end(), [](const PleLine& a, const PleLine& b) { return a.center_ghz < b.center_ghz; });
  return out;
}

void synthetic_ple_spectrum(const LevelSystem& system, const SyntheticSpectrum& p, std::vector<double>& f,
                            std::vector<double>& y) {
  if (p.points < 3) throw std::invalid_argument("synthetic spectrum needs at least 3 points");
  if (!(p.f_max_ghz > p.f_min_ghz)) throw std::invalid_argument("synthetic spectrum range is empty");
  if (!(p.fwhm_ghz > 0.0)) throw std::invalid_argument("line width must be > 0");
  const auto lines = ple_line_layout(system);
  double peak = 0.0;
  for (const auto& l : lines) peak = std::max(peak, l.amplitude);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> noise(0.0, p.noise * peak);
  f.resize(p.points);
  y.resize(p.points);
  for (int i = 0; i < p.points; ++i) {
    f[i] = p.f_min_ghz + (p.f_max_ghz - p.f_min_ghz) * i / (p.points - 1);
    double s = 0.0;
    for (const auto& l : lines) {
      const double x = (f[i] - l.center_ghz) / p.fwhm_ghz;
      s += l.amplitude * std::exp(-4.0 * std::log(2.0) * x * x);
    }
    y[i] = s + (p.noise > 0.0 ? noise(rng) : 0.0);
  }
}

}  // namespace sivsim
