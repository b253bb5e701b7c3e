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

#include "sivsim/fwm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sivsim/ensemble.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/units.hpp"

namespace sivsim {

void FwmMedium::validate() const {
  if (!(coupling_signal >= 0.0) || !(coupling_stokes >= 0.0)) throw std::invalid_argument("FWM couplings must be >= 0");
  if (!(spin_wave_decay >= 0.0)) throw std::invalid_argument("spin-wave decay must be >= 0");
  if (!(std::abs(population_inversion) <= 1.0)) throw std::invalid_argument("population inversion must lie in [-1, 1]");
  if (!(length > 0.0)) throw std::invalid_argument("medium length must be > 0");
  if (!std::isfinite(stark_signal_ghz) || !std::isfinite(stark_stokes_ghz) || !std::isfinite(two_photon_detuning_ghz))
    throw std::invalid_argument("FWM detunings must be finite");
}

double FwmMedium::effective_detuning() const {
  return kTwoPi * (two_photon_detuning_ghz + stark_signal_ghz - stark_stokes_ghz);
}

std::string_view to_string(StokesAnchor a) { return a == StokesAnchor::kExcited4 ? "upper-excited" : "lower-excited"; }

StokesAnchor stokes_anchor_from_string(std::string_view name) {
  if (name == "upper-excited") return StokesAnchor::kExcited4;
  if (name == "lower-excited") return StokesAnchor::kExcited3;
  throw std::invalid_argument("unknown Stokes anchor '" + std::string(name) +
                              "' (expected upper-excited or lower-excited)");
}

FwmMedium adiabatic_couplings(double control_rabi, double delta_ghz, const LevelSystem& system, double optical_depth,
                              StokesAnchor anchor) {
  if (delta_ghz == 0.0 || !std::isfinite(delta_ghz))
    throw std::invalid_argument("adiabatic elimination needs a nonzero single-photon detuning");
  if (!(optical_depth >= 0.0)) throw std::invalid_argument("optical depth must be >= 0");
  if (!(control_rabi >= 0.0)) throw std::invalid_argument("control Rabi frequency must be >= 0");
  const double delta_k = delta_ghz + system.ground_splitting_ghz() +
                         (anchor == StokesAnchor::kExcited3 ? system.excited_splitting_ghz() : 0.0);
  const double root = std::sqrt(optical_depth * system.radiative_rate(kExcited4));
  FwmMedium m;
  m.coupling_signal = control_rabi * root / std::abs(kTwoPi * delta_ghz);
  m.coupling_stokes = control_rabi * root / std::abs(kTwoPi * delta_k);
  m.stark_signal_ghz = control_rabi * control_rabi / (4.0 * kTwoPi * delta_ghz) / kTwoPi;
  m.stark_stokes_ghz = control_rabi * control_rabi / (4.0 * kTwoPi * delta_k) / kTwoPi;
  return m;
}

std::optional<std::string> adiabatic_warning(double delta_ghz, const LevelSystem& system) {
  const double linewidth_ghz = system.total_rate(kExcited4) / kTwoPi;
  if (std::abs(delta_ghz) < 100.0 * linewidth_ghz) {
    std::ostringstream os;
    os << "single-photon detuning " << delta_ghz << " GHz is not large against the optical linewidth ("
       << linewidth_ghz << " GHz); adiabatic elimination is questionable";
    return os.str();
  }
  return std::nullopt;
}

std::vector<Complex> FwmGrid::signal_out() const {
  const Eigen::VectorXcd row = signal.row(signal.rows() - 1);
  return {row.data(), row.data() + row.size()};
}

std::vector<Complex> FwmGrid::stokes_out() const {
  const Eigen::VectorXcd row = stokes.row(stokes.rows() - 1);
  return {row.data(), row.data() + row.size()};
}

namespace {

class Slab {
 public:
  Slab(const FwmMedium& m, int nz)
      : a_(m.coupling_signal),
        b_(m.coupling_stokes),
        n_(m.population_inversion),
        decay_(m.spin_wave_decay, m.effective_detuning()),
        dz_(m.length / nz),
        s_(nz + 1),
        k_(nz + 1) {}

  // Trapezoidal z sweep of both fields for a given spin wave.
  void sweep(const Eigen::VectorXcd& b, Complex s0, Complex k0) {
    s_(0) = s0;
    k_(0) = k0;
    const Complex i(0.0, 1.0);
    for (Eigen::Index j = 0; j + 1 < b.size(); ++j) {
      const Complex mean = 0.5 * dz_ * (b(j) + b(j + 1));
      s_(j + 1) = s_(j) + i * a_ * mean;
      k_(j + 1) = k_(j) - i * b_ * mean;
    }
  }

  void rhs(const Eigen::VectorXcd& b, Eigen::VectorXcd& out) const {
    const Complex i(0.0, 1.0);
    out = (i * n_) * (a_ * s_ + b_ * k_) - decay_ * b;
  }

  const Eigen::VectorXcd& s() const { return s_; }
  const Eigen::VectorXcd& k() const { return k_; }

 private:
  double a_, b_, n_;
  Complex decay_;
  double dz_;
  Eigen::VectorXcd s_, k_;
};

double trapezoid_energy(const std::vector<double>& t, const std::vector<Complex>& v) {
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) e += 0.5 * (t[i + 1] - t[i]) * (std::norm(v[i]) + std::norm(v[i + 1]));
  return e;
}

}  // namespace

FwmGrid propagate_fwm(const FwmMedium& medium, const FwmSeeds& seeds, const FwmGridOptions& opt) {
  medium.validate();
  if (opt.nz < 1) throw std::invalid_argument("FWM grid needs at least one z slab");
  if (opt.max_refine < 1) throw std::invalid_argument("max_refine must be >= 1");
  const std::size_t nt = seeds.t_ns.size();
  if (nt < 2) throw std::invalid_argument("FWM seeds need at least two time samples");
  if (seeds.signal.size() != nt || seeds.stokes.size() != nt)
    throw std::invalid_argument("signal and Stokes seeds must be sampled on the time grid");
  for (std::size_t i = 1; i < nt; ++i)
    if (!(seeds.t_ns[i] > seeds.t_ns[i - 1])) throw std::invalid_argument("seed time grid must be ascending");
  const int nodes = opt.nz + 1;
  if (!seeds.spin_wave.empty() && static_cast<int>(seeds.spin_wave.size()) != nodes)
    throw std::invalid_argument("spin-wave seed must have nz + 1 samples");

  // Stability guard: h * (decay + |delta'| + n (a^2 + b^2) L) <= 0.5.
  const double rate = medium.spin_wave_decay + std::abs(medium.effective_detuning()) +
                      std::abs(medium.population_inversion) *
                          (medium.coupling_signal * medium.coupling_signal +
                           medium.coupling_stokes * medium.coupling_stokes) *
                          medium.length;
  double h_max = 0.0;
  for (std::size_t i = 1; i < nt; ++i) h_max = std::max(h_max, seeds.t_ns[i] - seeds.t_ns[i - 1]);
  const int substeps = std::max(1, static_cast<int>(std::ceil(h_max * rate / 0.5)));
  if (substeps > opt.max_refine) {
    std::ostringstream os;
    os << "FWM time step too coarse: stability needs " << substeps << " sub-steps per interval (limit "
       << opt.max_refine << ")";
    throw SolverError(os.str(), seeds.t_ns.front());
  }

  FwmGrid g;
  g.z = Eigen::VectorXd::LinSpaced(nodes, 0.0, medium.length);
  g.t_ns = seeds.t_ns;
  g.signal.resize(nodes, static_cast<Eigen::Index>(nt));
  g.stokes.resize(nodes, static_cast<Eigen::Index>(nt));
  g.spin_wave.resize(nodes, static_cast<Eigen::Index>(nt));
  g.substeps = substeps;

  Slab slab(medium, opt.nz);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(nodes);
  if (!seeds.spin_wave.empty())
    for (int j = 0; j < nodes; ++j) b(j) = seeds.spin_wave[j];

  auto store = [&](std::size_t col) {
    g.signal.col(static_cast<Eigen::Index>(col)) = slab.s();
    g.stokes.col(static_cast<Eigen::Index>(col)) = slab.k();
    g.spin_wave.col(static_cast<Eigen::Index>(col)) = b;
  };
  slab.sweep(b, seeds.signal[0], seeds.stokes[0]);
  store(0);

  Eigen::VectorXcd f0(nodes), f1(nodes), b_pred(nodes);
  for (std::size_t i = 0; i + 1 < nt; ++i) {
    const double h = (seeds.t_ns[i + 1] - seeds.t_ns[i]) / substeps;
    for (int k = 0; k < substeps; ++k) {
      // Boundary values interpolated linearly inside the seed interval.
      const double w0 = static_cast<double>(k) / substeps, w1 = static_cast<double>(k + 1) / substeps;
      const Complex s_a = (1.0 - w0) * seeds.signal[i] + w0 * seeds.signal[i + 1];
      const Complex k_a = (1.0 - w0) * seeds.stokes[i] + w0 * seeds.stokes[i + 1];
      const Complex s_b = (1.0 - w1) * seeds.signal[i] + w1 * seeds.signal[i + 1];
      const Complex k_b = (1.0 - w1) * seeds.stokes[i] + w1 * seeds.stokes[i + 1];
      slab.sweep(b, s_a, k_a);
      slab.rhs(b, f0);
      b_pred = b + h * f0;
      slab.sweep(b_pred, s_b, k_b);
      slab.rhs(b_pred, f1);
      b += 0.5 * h * (f0 + f1);
    }
    slab.sweep(b, seeds.signal[i + 1], seeds.stokes[i + 1]);
    store(i + 1);
  }
  return g;
}

double signal_gain(const std::vector<double>& t, const std::vector<Complex>& in, const std::vector<Complex>& out) {
  if (in.size() != t.size() || out.size() != t.size()) throw std::invalid_argument("signal_gain: size mismatch");
  const double e_in = trapezoid_energy(t, in);
  if (!(e_in > 0.0)) throw std::invalid_argument("signal_gain: input energy is zero");
  return trapezoid_energy(t, out) / e_in;
}

FwmSeeds FwmPulseSeeds::sample(double phase) const {
  if (samples < 2 || !(t_end_ns > 0.0) || !(fwhm_ns > 0.0)) throw std::invalid_argument("invalid FWM seed pulse");
  FwmSeeds s;
  const Complex rot = std::polar(1.0, phase);
  for (int i = 0; i < samples; ++i) {
    const double t = t_end_ns * i / (samples - 1);
    const double x = (t - center_ns) / fwhm_ns;
    const double env = std::exp(-2.0 * std::log(2.0) * x * x);  // intensity FWHM = fwhm_ns
    s.t_ns.push_back(t);
    s.signal.push_back(signal * rot * env);
    s.stokes.push_back(stokes * env);
  }
  return s;
}

std::vector<PhasePoint> phase_response(const FwmMedium& medium, const FwmPulseSeeds& seeds,
                                       const std::vector<double>& phases, const FwmGridOptions& opt, int threads) {
  if (phases.empty()) throw std::invalid_argument("phase grid is empty");
  std::vector<PhasePoint> out(phases.size());
  parallel_for(phases.size(), threads, [&](std::size_t i) {
    const auto in = seeds.sample(phases[i]);
    const auto g = propagate_fwm(medium, in, opt);
    const bool has_stokes = std::abs(seeds.stokes) > 0.0;
    out[i] = {phases[i], signal_gain(in.t_ns, in.signal, g.signal_out()),
              has_stokes ? signal_gain(in.t_ns, in.stokes, g.stokes_out()) : std::numeric_limits<double>::quiet_NaN()};
  });
  return out;
}

double rethermalized_inversion(double rho22_pumped, double delay, double t1, double temperature_k,
                               double ground_splitting_ghz) {
  if (!(delay >= 0.0)) throw std::invalid_argument("delay must be >= 0");
  if (!(t1 > 0.0)) throw std::invalid_argument("T1 must be > 0");
  if (!(rho22_pumped >= 0.0 && rho22_pumped <= 1.0)) throw std::invalid_argument("rho22 must lie in [0, 1]");
  const double r = boltzmann_ratio(temperature_k, ground_splitting_ghz);
  const double thermal = (1.0 - r) / (1.0 + r);
  const double pumped = 1.0 - 2.0 * rho22_pumped;
  if (std::isinf(t1)) return pumped;
  return thermal + (pumped - thermal) * std::exp(-delay / t1);
}

StokesCalibration calibrate_stokes_ratio(const FwmMedium& medium, const FwmPulseSeeds& seeds,
                                         const std::vector<double>& phases, double max_ratio,
                                         const FwmGridOptions& opt) {
  if (phases.empty()) throw std::invalid_argument("phase grid is empty");
  if (!(max_ratio > 0.0)) throw std::invalid_argument("max Stokes ratio must be > 0");
  // Basis responses; the signal seed amplitude sets the scale of both.
  FwmPulseSeeds only_signal = seeds, only_stokes = seeds;
  only_signal.stokes = 0.0;
  only_stokes.stokes = std::abs(seeds.signal) > 0.0 ? std::abs(seeds.signal) : 1.0;
  only_stokes.signal = 0.0;
  const auto in = only_signal.sample(0.0);
  const auto from_s = propagate_fwm(medium, in, opt);
  const auto from_k = propagate_fwm(medium, only_stokes.sample(0.0), opt);
  const auto ss = from_s.signal_out(), sk = from_s.stokes_out();
  const auto ks = from_k.signal_out(), kk = from_k.stokes_out();
  const double e_in = trapezoid_energy(in.t_ns, in.signal);
  const std::size_t nt = in.t_ns.size();

  auto evaluate = [&](double ratio) {
    StokesCalibration c;
    c.stokes_ratio = ratio;
    c.min_gain = std::numeric_limits<double>::infinity();
    c.max_gain = -c.min_gain;
    double k_at_min = 0.0, k_at_max = 0.0;
    std::vector<Complex> s_out(nt), k_out(nt);
    for (double phi : phases) {
      const Complex rot = std::polar(1.0, phi);
      for (std::size_t i = 0; i < nt; ++i) {
        s_out[i] = rot * ss[i] + ratio * ks[i];
        k_out[i] = rot * sk[i] + ratio * kk[i];
      }
      const double gs = trapezoid_energy(in.t_ns, s_out) / e_in;
      const double gk = ratio > 0.0 ? trapezoid_energy(in.t_ns, k_out) / (ratio * ratio * e_in) : 0.0;
      if (gs < c.min_gain) {
        c.min_gain = gs;
        k_at_min = gk;
      }
      if (gs > c.max_gain) {
        c.max_gain = gs;
        k_at_max = gk;
      }
    }
    c.margin = std::min({0.2 - c.min_gain, c.max_gain - 1.6, ratio > 0.0 ? k_at_max - 1.0 : -1.0,
                         ratio > 0.0 ? 1.0 - k_at_min : -1.0});
    return c;
  };

  constexpr int kCoarse = 121;
  StokesCalibration best = evaluate(0.0);
  int best_i = 0;
  for (int i = 1; i < kCoarse; ++i) {
    const auto c = evaluate(max_ratio * i / (kCoarse - 1));
    if (c.margin > best.margin) {
      best = c;
      best_i = i;
    }
  }
  // Golden-section refinement in the neighbouring cells.
  double a = max_ratio * std::max(best_i - 1, 0) / (kCoarse - 1);
  double b = max_ratio * std::min(best_i + 1, kCoarse - 1) / (kCoarse - 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  auto c1 = evaluate(x1), c2 = evaluate(x2);
  while (b - a > 1e-6 * max_ratio) {
    if (c1.margin < c2.margin) {
      a = x1;
      x1 = x2;
      c1 = c2;
      x2 = a + g * (b - a);
      c2 = evaluate(x2);
    } else {
      b = x2;
      x2 = x1;
      c2 = c1;
      x1 = b - g * (b - a);
      c1 = evaluate(x1);
    }
  }
  const auto refined = evaluate(0.5 * (a + b));
  return refined.margin > best.margin ? refined : best;
}

}  // namespace sivsim
