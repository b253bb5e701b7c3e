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

#include "sivsim/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "sivsim/errors.hpp"
#include "sivsim/hamiltonian.hpp"
#include "sivsim/lindblad.hpp"

namespace sivsim {
namespace {

// Dormand-Prince 5(4) tableau with Hairer's 4th-order continuous extension.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

class MasterEquation {
 public:
  MasterEquation(const LevelSystem& system, const PulseTimeline& timeline, double emitter_detuning_ghz)
      : rates_(system.rates()),
        timeline_(timeline),
        frame_(system, timeline.drives()),
        detuning_(emitter_detuning_ghz) {}

  void operator()(double t, const DensityMatrix& rho, DensityMatrix& out) {
    frame_.assemble(timeline_.drives(), detuning_, t, h_);
    lindblad_rhs_into(rho, h_, rates_, timeline_.excess_dephasing_rate(t), out);
  }

 private:
  const RateMatrix& rates_;
  const PulseTimeline& timeline_;
  RwaFrame frame_;
  double detuning_;
  Hamiltonian h_;
};

struct Step {
  DensityMatrix k1, k2, k3, k4, k5, k6, k7, y_new, y_err;
};

// One Dormand-Prince step; k1 must hold f(t, y) on entry. k7 = f(t + h, y_new).
void dp_step(MasterEquation& f, double t, const DensityMatrix& y, double h, Step& s) {
  DensityMatrix tmp;
  tmp = y + h * a21 * s.k1;
  f(t + c2 * h, tmp, s.k2);
  tmp = y + h * (a31 * s.k1 + a32 * s.k2);
  f(t + c3 * h, tmp, s.k3);
  tmp = y + h * (a41 * s.k1 + a42 * s.k2 + a43 * s.k3);
  f(t + c4 * h, tmp, s.k4);
  tmp = y + h * (a51 * s.k1 + a52 * s.k2 + a53 * s.k3 + a54 * s.k4);
  f(t + c5 * h, tmp, s.k5);
  tmp = y + h * (a61 * s.k1 + a62 * s.k2 + a63 * s.k3 + a64 * s.k4 + a65 * s.k5);
  f(t + h, tmp, s.k6);
  s.y_new = y + h * (a71 * s.k1 + a73 * s.k3 + a74 * s.k4 + a75 * s.k5 + a76 * s.k6);
  f(t + h, s.y_new, s.k7);
  s.y_err = h * (e1 * s.k1 + e3 * s.k3 + e4 * s.k4 + e5 * s.k5 + e6 * s.k6 + e7 * s.k7);
}

class DenseOutput {
 public:
  void prepare(const DensityMatrix& y, double t, double h, const Step& s) {
    t_ = t;
    h_ = h;
    r1_ = y;
    const DensityMatrix ydiff = s.y_new - y;
    const DensityMatrix bspl = h * s.k1 - ydiff;
    r2_ = ydiff;
    r3_ = bspl;
    r4_ = ydiff - h * s.k7 - bspl;
    r5_ = h * (d1 * s.k1 + d3 * s.k3 + d4 * s.k4 + d5 * s.k5 + d6 * s.k6 + d7 * s.k7);
  }

  DensityMatrix at(double t) const {
    const double th = (t - t_) / h_;
    const double th1 = 1.0 - th;
    return r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
  }

 private:
  double t_ = 0.0, h_ = 1.0;
  DensityMatrix r1_, r2_, r3_, r4_, r5_;
};

double error_norm(const DensityMatrix& err, const DensityMatrix& y0, const DensityMatrix& y1, double tol) {
  double sum = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double scale = tol + tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double r = std::abs(err(i)) / scale;
    sum += r * r;
  }
  return std::sqrt(sum / 16.0);
}

class InvariantMonitor {
 public:
  InvariantMonitor(const EvolveOptions& opt) : opt_(opt) {}

  // Trace and hermiticity every step. Positivity via a shifted Cholesky
  // unless exact diagnostics are requested; eigenvalues then only when it fails.
  void check(double t, const DensityMatrix& rho, double last_good_t, Trajectory& traj) {
    const double trace_err = std::abs(rho.trace() - 1.0);
    double herm = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) herm = std::max(herm, std::abs(rho(i, j) - std::conj(rho(j, i))));
    traj.worst.trace_error = std::max(traj.worst.trace_error, trace_err);
    traj.worst.hermiticity_error = std::max(traj.worst.hermiticity_error, herm);
    const auto& tol = opt_.invariant_tolerances;
    bool positive = true;
    if (opt_.exact_diagnostics) {
      const double min_eig = validate_state(rho).min_eigenvalue;
      traj.worst.min_eigenvalue = std::min(traj.worst.min_eigenvalue, min_eig);
      positive = min_eig >= tol.min_eigenvalue;
    } else {
      DensityMatrix shifted = 0.5 * (rho + rho.adjoint());
      shifted.diagonal().array() -= tol.min_eigenvalue;
      Eigen::LLT<DensityMatrix> llt(shifted);
      if (llt.info() != Eigen::Success) {
        const double min_eig = validate_state(rho).min_eigenvalue;
        traj.worst.min_eigenvalue = std::min(traj.worst.min_eigenvalue, min_eig);
        positive = min_eig >= tol.min_eigenvalue;
      }
    }
    if (!opt_.check_invariants) return;
    if (trace_err > tol.trace || herm > tol.hermiticity || !positive) {
      const auto d = validate_state(rho);
      std::ostringstream os;
      os << "density-matrix invariant violated at t = " << t << " ns (trace error " << d.trace_error
         << ", hermiticity error " << d.hermiticity_error << ", min eigenvalue " << d.min_eigenvalue << ")";
      throw SolverError(os.str(), last_good_t);
    }
  }

  void record_sample(const DensityMatrix& rho, Trajectory& traj) {
    traj.worst.min_eigenvalue = std::min(traj.worst.min_eigenvalue, validate_state(rho).min_eigenvalue);
  }

 private:
  const EvolveOptions& opt_;
};

std::vector<double> resolve_samples(const EvolveOptions& opt, double t0, double t1) {
  if (opt.sample_times.empty()) return {t0, t1};
  std::vector<double> s = opt.sample_times;
  if (!std::is_sorted(s.begin(), s.end())) throw std::invalid_argument("sample times must be ascending");
  const double slack = 1e-12 * (1.0 + std::abs(t1));
  if (s.front() < t0 - slack || s.back() > t1 + slack)
    throw std::invalid_argument("sample times must lie within the integration interval");
  return s;
}

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const LevelSystem& system, const PulseTimeline& timeline,
                  double t0, double t1, const EvolveOptions& opt, double emitter_detuning_ghz) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 >= t0))
    throw std::invalid_argument("integration interval must be finite with t1 >= t0");
  if (!opt.fixed_step && !(opt.tol >= 1e-12 && opt.tol <= 1e-4))
    throw std::invalid_argument("tolerance must lie in [1e-12, 1e-4]");
  if (opt.fixed_step && !(opt.fixed_step_ns > 0.0)) throw std::invalid_argument("fixed step must be > 0");

  const auto initial = validate_state(rho0);
  if (opt.check_invariants && !satisfies(initial, opt.invariant_tolerances))
    throw std::invalid_argument("initial state is not a valid density matrix");

  MasterEquation f(system, timeline, emitter_detuning_ghz);
  InvariantMonitor monitor(opt);
  const std::vector<double> samples = resolve_samples(opt, t0, t1);

  Trajectory traj;
  traj.worst = initial;
  traj.times.reserve(samples.size());
  traj.states.reserve(samples.size());
  std::size_t next_sample = 0;
  auto emit_upto = [&](double t_end, const DenseOutput* dense, const DensityMatrix& y_end, bool inclusive_end) {
    while (next_sample < samples.size()) {
      const double ts = samples[next_sample];
      if (ts > t_end || (!inclusive_end && ts == t_end)) break;
      DensityMatrix rho = (dense && ts != t_end) ? dense->at(ts) : y_end;
      monitor.record_sample(rho, traj);
      traj.times.push_back(ts);
      traj.states.push_back(std::move(rho));
      ++next_sample;
    }
  };

  DensityMatrix y = rho0;
  double t = t0;
  emit_upto(t0, nullptr, y, true);
  if (t1 == t0) {
    emit_upto(t1, nullptr, y, true);
    return traj;
  }

  Step s;
  DenseOutput dense;

  if (opt.fixed_step) {
    const double h_nominal = opt.fixed_step_ns;
    const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / h_nominal - 1e-9));
    f(t, y, s.k1);
    for (std::size_t k = 0; k < n; ++k) {
      const double t_next = (k + 1 == n) ? t1 : t0 + static_cast<double>(k + 1) * h_nominal;
      const double h = t_next - t;
      dp_step(f, t, y, h, s);
      dense.prepare(y, t, h, s);
      monitor.check(t_next, s.y_new, t, traj);
      emit_upto(t_next, &dense, s.y_new, true);
      y = s.y_new;
      t = t_next;
      s.k1 = s.k7;
      ++traj.accepted_steps;
    }
    emit_upto(t1, nullptr, y, true);
    return traj;
  }

  // Adaptive integration, restarted at every window edge.
  // Window edges that round onto t0, t1 or each other would leave
  // degenerate segments; drop them.
  const double merge = 1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)});
  std::vector<double> stops;
  for (double b : timeline.breakpoints())
    if (b > t0 + merge && b < t1 - merge && (stops.empty() || b > stops.back() + merge)) stops.push_back(b);
  stops.push_back(t1);

  const double h_max_global = opt.max_step_ns > 0.0 ? opt.max_step_ns : std::numeric_limits<double>::infinity();
  double h = 0.0;
  for (double seg_end : stops) {
    const double seg_len = seg_end - t;
    if (seg_len <= 0.0) continue;
    f(t, y, s.k1);
    if (h <= 0.0) {
      const double fnorm = s.k1.cwiseAbs().maxCoeff();
      h = fnorm > 0.0 ? 0.01 * std::pow(opt.tol, 0.2) / fnorm : seg_len;
    }
    h = std::min({h, seg_len, h_max_global});
    bool last_rejected = false;
    while (t < seg_end) {
      if (traj.accepted_steps + traj.rejected_steps >= opt.max_steps) {
        std::ostringstream os;
        os << "step budget of " << opt.max_steps << " exhausted at t = " << t << " ns";
        throw SolverError(os.str(), t);
      }
      bool final_step = false;
      if (t + h >= seg_end || seg_end - (t + h) < 1e-12 * std::abs(seg_end)) {
        h = seg_end - t;
        final_step = true;
      }
      const double h_min = 1e-14 * std::max(1.0, std::abs(t));
      if (h < h_min) {
        std::ostringstream os;
        os << "step size underflow (h = " << h << " ns) at t = " << t << " ns";
        throw SolverError(os.str(), t);
      }
      dp_step(f, t, y, h, s);
      const double err = error_norm(s.y_err, y, s.y_new, opt.tol);
      if (!(err <= 1.0)) {
        ++traj.rejected_steps;
        const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
        h *= fac;
        last_rejected = true;
        continue;
      }
      const double t_new = final_step ? seg_end : t + h;
      monitor.check(t_new, s.y_new, t, traj);
      dense.prepare(y, t, h, s);
      emit_upto(t_new, &dense, s.y_new, true);
      y = s.y_new;
      t = t_new;
      s.k1 = s.k7;
      ++traj.accepted_steps;
      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      last_rejected = false;
      h = std::min(h * fac, h_max_global);
    }
  }
  emit_upto(t1, nullptr, y, true);
  return traj;
}

}  // namespace sivsim
