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

#include <string>
#include <string_view>
#include <vector>

namespace sivsim {

enum class DecayModel { kGaussian, kExponential, kGaussianTimesExponential };

std::string_view to_string(DecayModel m);
DecayModel decay_model_from_string(std::string_view name);

/// Fit of y(t) = A exp(-a t^2 - b t).
///   gaussian:     b = 0
///   exponential:  a = 0
///   mixed:        a, b >= 0
/// time_constant is the 1/e time of the fitted envelope.
struct DecayFit {
  DecayModel model = DecayModel::kGaussianTimesExponential;
  double time_constant_ns = 0.0;
  double uncertainty_ns = 0.0;
  double amplitude = 0.0;
  double gaussian_rate = 0.0;     // a, 1/ns^2
  double exponential_rate = 0.0;  // b, 1/ns
  /// sqrt(mean squared residual) relative to max |y|; infinity when flagged.
  double residual_norm = 0.0;
  bool flagged = false;
  std::string message;

  double evaluate(double t_ns) const;
};

DecayFit fit_decay(const std::vector<double>& t_ns, const std::vector<double>& y, DecayModel model);

struct SpectralLine {
  double center_ghz;
  double fwhm_ghz;
  double amplitude;
};

struct SpectrumFit {
  std::vector<SpectralLine> lines;  // sorted by center
  double residual_norm = 0.0;
  bool flagged = false;
  std::string message;

  double evaluate(double f_ghz) const;
};

/// Sum-of-Gaussians least squares. Initial lines come from the n_lines
/// highest local maxima above 1e-3 of the global maximum.
SpectrumFit fit_ple_spectrum(const std::vector<double>& f_ghz, const std::vector<double>& intensity, int n_lines);

}  // namespace sivsim
