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

#include "sivsim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "sivsim/units.hpp"

namespace sivsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Residuals = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r)>;
using Jacobian = std::function<void(const Eigen::VectorXd& p, Eigen::MatrixXd& j)>;

struct LmFunctor : Eigen::DenseFunctor<double> {
  LmFunctor(int n, int m, Residuals f, Jacobian df) : DenseFunctor(n, m), f_(std::move(f)), df_(std::move(df)) {}
  int operator()(const InputType& x, ValueType& fvec) const {
    f_(x, fvec);
    return fvec.allFinite() ? 0 : -1;
  }
  int df(const InputType& x, JacobianType& fjac) const {
    df_(x, fjac);
    return 0;
  }
  Residuals f_;
  Jacobian df_;
};

struct LmOutcome {
  bool converged;
  Eigen::MatrixXd covariance;  // of the parameters, scaled by the residual variance
  double rss;
};

LmOutcome least_squares(Eigen::VectorXd& p, int m, const Residuals& f, const Jacobian& df, int max_fev = 4000) {
  const int n = static_cast<int>(p.size());
  LmFunctor functor(n, m, f, df);
  Eigen::LevenbergMarquardt<LmFunctor> lm(functor);
  lm.setMaxfev(max_fev);
  lm.setXtol(1e-14);
  lm.setFtol(1e-14);
  lm.setGtol(0.0);
  const auto status = lm.minimize(p);
  using namespace Eigen::LevenbergMarquardtSpace;
  bool ok = status != ImproperInputParameters && status != TooManyFunctionEvaluation && status != UserAsked;

  Eigen::VectorXd r(m);
  f(p, r);
  Eigen::MatrixXd j(m, n);
  df(p, j);
  LmOutcome out{ok && r.allFinite() && p.allFinite(), Eigen::MatrixXd::Constant(n, n, kInf), r.squaredNorm()};
  if (m > n) {
    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) out.covariance = lu.inverse() * (out.rss / (m - n));
  }
  return out;
}

double one_over_e_time(double a, double b) {
  if (a <= 0.0) return b > 0.0 ? 1.0 / b : kInf;
  return 2.0 / (b + std::sqrt(b * b + 4.0 * a));
}

constexpr double kUnresolvedFactor = 100.0;

DecayFit flagged_decay(DecayModel model, std::string why) {
  DecayFit f;
  f.model = model;
  f.flagged = true;
  f.residual_norm = kInf;
  f.message = std::move(why);
  return f;
}

}  // namespace

std::string_view to_string(DecayModel m) {
  switch (m) {
    case DecayModel::kGaussian: return "gaussian-decay";
    case DecayModel::kExponential: return "exponential-decay";
    case DecayModel::kGaussianTimesExponential: return "gaussian-times-exponential";
  }
  return "?";
}

DecayModel decay_model_from_string(std::string_view name) {
  if (name == "gaussian-decay") return DecayModel::kGaussian;
  if (name == "exponential-decay") return DecayModel::kExponential;
  if (name == "gaussian-times-exponential") return DecayModel::kGaussianTimesExponential;
  throw std::invalid_argument("unknown decay model '" + std::string(name) +
                              "' (expected gaussian-decay, exponential-decay or gaussian-times-exponential)");
}

double DecayFit::evaluate(double t) const {
  return amplitude * std::exp(-gaussian_rate * t * t - exponential_rate * t);
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, DecayModel model) {
  if (t.size() != y.size()) throw std::invalid_argument("fit_decay: t and y differ in length");
  if (t.size() < 5) throw std::invalid_argument("fit_decay: need at least 5 points");
  const int m = static_cast<int>(t.size());
  const double y_max = *std::max_element(y.begin(), y.end());
  const double y_min = *std::min_element(y.begin(), y.end());
  if (!(y_max > 0.0)) return flagged_decay(model, "no positive samples");
  if (y_max - y_min <= 1e-9 * y_max) return flagged_decay(model, "series is constant; decay not identifiable");

  const bool use_a = model != DecayModel::kExponential;
  const bool use_b = model != DecayModel::kGaussian;

  // Log-linear pre-fit on the positive samples, weighted by y^2 so the
  // noisy tail does not dominate.
  double log_a = std::log(y_max), a0 = 0.0, b0 = 0.0;
  {
    const int k = 1 + use_a + use_b;
    Eigen::MatrixXd x(m, k);
    Eigen::VectorXd rhs(m);
    int rows = 0;
    for (int i = 0; i < m; ++i) {
      if (!(y[i] > 1e-6 * y_max)) continue;
      const double w = y[i] / y_max;
      int c = 0;
      x(rows, c++) = w;
      if (use_a) x(rows, c++) = -w * t[i] * t[i];
      if (use_b) x(rows, c++) = -w * t[i];
      rhs(rows) = w * std::log(y[i]);
      ++rows;
    }
    if (rows >= k) {
      const Eigen::VectorXd sol = x.topRows(rows).colPivHouseholderQr().solve(rhs.head(rows));
      log_a = sol(0);
      if (use_a) a0 = sol(1);
      if (use_b) b0 = sol(use_a ? 2 : 1);
    }
    // Fall back to a crude span-based guess for unphysical signs.
    const double span = std::max(t.back() - t.front(), 1e-12);
    if (use_a && !(a0 > 0.0)) a0 = use_b ? 0.1 / (span * span) : 1.0 / (span * span);
    if (use_b && !(b0 > 0.0)) b0 = use_a ? 0.1 / span : 1.0 / span;
  }

  // Parameters: A, p, q with a = p^2, b = q^2.
  const int n = 1 + use_a + use_b;
  Eigen::VectorXd p(n);
  p(0) = std::exp(log_a);
  int idx = 1;
  if (use_a) p(idx++) = std::sqrt(a0);
  if (use_b) p(idx++) = std::sqrt(b0);
  auto unpack = [&](const Eigen::VectorXd& v, double& amp, double& a, double& b) {
    amp = v(0);
    int i = 1;
    a = use_a ? v(i) * v(i) : 0.0;
    if (use_a) ++i;
    b = use_b ? v(i) * v(i) : 0.0;
  };
  Residuals f = [&](const Eigen::VectorXd& v, Eigen::VectorXd& r) {
    double amp, a, b;
    unpack(v, amp, a, b);
    for (int i = 0; i < m; ++i) r(i) = amp * std::exp(-a * t[i] * t[i] - b * t[i]) - y[i];
  };
  Jacobian df = [&](const Eigen::VectorXd& v, Eigen::MatrixXd& j) {
    double amp, a, b;
    unpack(v, amp, a, b);
    for (int i = 0; i < m; ++i) {
      const double e = std::exp(-a * t[i] * t[i] - b * t[i]);
      int c = 0;
      j(i, c++) = e;
      if (use_a) {
        j(i, c) = -2.0 * amp * e * t[i] * t[i] * v(c);
        ++c;
      }
      if (use_b) j(i, c) = -2.0 * amp * e * t[i] * v(c);
    }
  };
  const LmOutcome lm = least_squares(p, m, f, df);

  DecayFit out;
  out.model = model;
  unpack(p, out.amplitude, out.gaussian_rate, out.exponential_rate);
  out.time_constant_ns = one_over_e_time(out.gaussian_rate, out.exponential_rate);
  out.residual_norm = std::sqrt(lm.rss / m) / std::max(std::abs(y_max), std::abs(y_min));

  // Uncertainty of the 1/e time by linear propagation through (p, q).
  {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    const double h = 1e-7;
    for (int k = 1; k < n; ++k) {
      Eigen::VectorXd hi = p, lo = p;
      const double step = h * std::max(1.0, std::abs(p(k)));
      hi(k) += step;
      lo(k) -= step;
      double amp, a1, b1, a2, b2;
      unpack(hi, amp, a1, b1);
      unpack(lo, amp, a2, b2);
      grad(k) = (one_over_e_time(a1, b1) - one_over_e_time(a2, b2)) / (2.0 * step);
    }
    const double var = grad.dot(lm.covariance * grad);
    out.uncertainty_ns = var >= 0.0 ? std::sqrt(var) : kInf;
  }

  if (!lm.converged) {
    out.flagged = true;
    out.residual_norm = kInf;
    out.message = "least squares did not converge";
  } else if (!(out.time_constant_ns > 0.0) || !std::isfinite(out.time_constant_ns)) {
    out.flagged = true;
    out.message = "fitted envelope does not decay";
  } else if (out.time_constant_ns > kUnresolvedFactor * (t.back() - t.front())) {
    // Decay far outside the sampled window is an extrapolation, not a measurement.
    out.flagged = true;
    out.message = "decay not resolved within the sampled window";
  }
  return out;
}

double SpectrumFit::evaluate(double f) const {
  double s = 0.0;
  for (const auto& l : lines) {
    const double x = (f - l.center_ghz) / l.fwhm_ghz;
    s += l.amplitude * std::exp(-4.0 * std::log(2.0) * x * x);
  }
  return s;
}

SpectrumFit fit_ple_spectrum(const std::vector<double>& f, const std::vector<double>& y, int n_lines) {
  if (n_lines < 1) throw std::invalid_argument("fit_ple_spectrum: n_lines must be >= 1");
  if (f.size() != y.size()) throw std::invalid_argument("fit_ple_spectrum: frequency and intensity differ in length");
  if (f.size() < 3) throw std::invalid_argument("fit_ple_spectrum: need at least 3 samples");
  if (!std::is_sorted(f.begin(), f.end())) throw std::invalid_argument("fit_ple_spectrum: frequencies must be sorted");
  const int m = static_cast<int>(f.size());
  const double y_max = *std::max_element(y.begin(), y.end());
  if (!(y_max > 0.0)) throw std::invalid_argument("fit_ple_spectrum: spectrum has no positive samples");

  // Peak detection.
  std::vector<int> peaks;
  for (int i = 1; i + 1 < m; ++i)
    if (y[i] > 1e-3 * y_max && y[i] >= y[i - 1] && y[i] > y[i + 1]) peaks.push_back(i);
  if (y[0] > y[1] && y[0] > 1e-3 * y_max) peaks.push_back(0);
  if (y[m - 1] > y[m - 2] && y[m - 1] > 1e-3 * y_max) peaks.push_back(m - 1);
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return y[a] > y[b]; });

  SpectrumFit out;
  if (static_cast<int>(peaks.size()) < n_lines) {
    out.flagged = true;
    out.message = "detected " + std::to_string(peaks.size()) + " peaks, fewer than the requested " +
                  std::to_string(n_lines);
  }
  if (static_cast<int>(peaks.size()) > n_lines) peaks.resize(n_lines);
  if (peaks.empty()) {
    out.residual_norm = kInf;
    return out;
  }
  std::sort(peaks.begin(), peaks.end());
  const int k = static_cast<int>(peaks.size());

  // Width guess from the half-maximum crossing on each side.
  const double spacing = (f.back() - f.front()) / (m - 1);
  Eigen::VectorXd p(3 * k);
  for (int l = 0; l < k; ++l) {
    const int i = peaks[l];
    const double half = 0.5 * y[i];
    int lo = i, hi = i;
    while (lo > 0 && y[lo] > half) --lo;
    while (hi < m - 1 && y[hi] > half) ++hi;
    const double width = std::max(f[hi] - f[lo], 2.0 * spacing);
    p(3 * l) = f[i];
    p(3 * l + 1) = std::sqrt(width);
    p(3 * l + 2) = std::sqrt(std::max(y[i], 1e-12 * y_max));
  }

  const double c = 4.0 * std::log(2.0);
  Residuals res = [&](const Eigen::VectorXd& v, Eigen::VectorXd& r) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int l = 0; l < k; ++l) {
        const double w = v(3 * l + 1) * v(3 * l + 1);
        const double x = (f[i] - v(3 * l)) / w;
        s += v(3 * l + 2) * v(3 * l + 2) * std::exp(-c * x * x);
      }
      r(i) = s - y[i];
    }
  };
  Jacobian jac = [&](const Eigen::VectorXd& v, Eigen::MatrixXd& j) {
    for (int i = 0; i < m; ++i) {
      for (int l = 0; l < k; ++l) {
        const double s = v(3 * l + 1), h = v(3 * l + 2);
        const double w = s * s;
        const double x = (f[i] - v(3 * l)) / w;
        const double e = std::exp(-c * x * x);
        const double amp = h * h;
        j(i, 3 * l) = amp * e * 2.0 * c * x / w;
        j(i, 3 * l + 1) = amp * e * 2.0 * c * x * x * 2.0 / s;
        j(i, 3 * l + 2) = 2.0 * h * e;
      }
    }
  };
  const LmOutcome lm = least_squares(p, m, res, jac, 400 * (3 * k + 1));

  for (int l = 0; l < k; ++l)
    out.lines.push_back({p(3 * l), p(3 * l + 1) * p(3 * l + 1), p(3 * l + 2) * p(3 * l + 2)});
  std::sort(out.lines.begin(), out.lines.end(),
            [](const SpectralLine& a, const SpectralLine& b) { return a.center_ghz < b.center_ghz; });
  out.residual_norm = std::sqrt(lm.rss / m) / y_max;
  if (!lm.converged) {
    out.flagged = true;
    out.residual_norm = kInf;
    if (!out.message.empty()) out.message += "; ";
    out.message += "least squares did not converge";
  }
  return out;
}

}  // namespace sivsim
