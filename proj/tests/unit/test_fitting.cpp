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

#include <cmath>
#include <random>

#include <catch_amalgamated.hpp>

#include "sivsim/experiments.hpp"
#include "sivsim/fitting.hpp"

using namespace sivsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(a + (b - a) * i / (n - 1));
  return t;
}

// 1/e time of A exp(-a t^2 - b t), solved directly.
double one_over_e(double a, double b) {
  if (a == 0.0) return 1.0 / b;
  return (-b + std::sqrt(b * b + 4 * a)) / (2 * a);
}

}  // namespace

TEST_CASE("decay fits recover known envelopes") {
  const auto t = grid(0.02, 0.2, 25);
  struct Case {
    DecayModel model;
    double amp, a, b;
  } cases[] = {{DecayModel::kGaussian, 0.9, 400.0, 0.0},
               {DecayModel::kExponential, 1.1, 0.0, 8.0},
               {DecayModel::kGaussianTimesExponential, 0.95, 150.0, 5.0}};
  for (const auto& c : cases) {
    std::vector<double> y;
    for (double x : t) y.push_back(c.amp * std::exp(-c.a * x * x - c.b * x));
    const auto fit = fit_decay(t, y, c.model);
    CHECK_FALSE(fit.flagged);
    CHECK_THAT(fit.amplitude, WithinRel(c.amp, 1e-6));
    CHECK_THAT(fit.time_constant_ns, WithinRel(one_over_e(c.a, c.b), 1e-6));
    CHECK(fit.residual_norm < 1e-6);
    CHECK_THAT(fit.evaluate(0.1), WithinRel(c.amp * std::exp(-c.a * 0.01 - c.b * 0.1), 1e-6));
  }
}

TEST_CASE("noisy data: the fitted 1/e time lies within a few sigma") {
  const auto t = grid(0.025, 0.12, 20);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.005);
  std::vector<double> y;
  for (double x : t) y.push_back(std::exp(-x * x / (0.053 * 0.053)) + noise(rng));
  const auto fit = fit_decay(t, y, DecayModel::kGaussian);
  CHECK(fit.uncertainty_ns > 0.0);
  CHECK(std::abs(fit.time_constant_ns - 0.053) < 5 * fit.uncertainty_ns + 1e-4);
}

TEST_CASE("degenerate inputs") {
  const auto t = grid(0.0, 1.0, 10);
  const auto fit = fit_decay(t, std::vector<double>(10, 0.5), DecayModel::kGaussian);
  CHECK(fit.flagged);
  CHECK(std::isinf(fit.residual_norm));
  CHECK_THROWS_AS(fit_decay(grid(0, 1, 4), {1, 0.8, 0.6, 0.4}, DecayModel::kExponential), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay(t, {1.0}, DecayModel::kExponential), std::invalid_argument);
  CHECK(decay_model_from_string("gaussian-times-exponential") == DecayModel::kGaussianTimesExponential);
  CHECK_THROWS_AS(decay_model_from_string("lorentzian"), std::invalid_argument);
}

TEST_CASE("decay far beyond the sampled window is flagged") {
  const auto t = grid(0.0, 0.1, 20);
  std::vector<double> y;
  for (double x : t) y.push_back(std::exp(-x / 1e4));
  const auto fit = fit_decay(t, y, DecayModel::kExponential);
  CHECK(fit.flagged);
  CHECK(fit.message.find("not resolved") != std::string::npos);
}

TEST_CASE("twelve-line spectrum fit recovers the line layout") {
  const auto sys = LevelSystem::siv();
  SyntheticSpectrum s;
  std::vector<double> f, y;
  synthetic_ple_spectrum(sys, s, f, y);
  const auto fit = fit_ple_spectrum(f, y, 12);
  REQUIRE_FALSE(fit.flagged);
  REQUIRE(fit.lines.size() == 12);
  auto layout = ple_line_layout(sys);
  std::sort(layout.begin(), layout.end(), [](auto& a, auto& b) { return a.center_ghz < b.center_ghz; });
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK_THAT(fit.lines[i].center_ghz, WithinAbs(layout[i].center_ghz, 0.05));
    CHECK_THAT(fit.lines[i].fwhm_ghz, WithinRel(10.0, 1e-2));
  }
  CHECK(fit.residual_norm < 1e-3);
}

TEST_CASE("spectrum fit flags when fewer peaks are resolvable") {
  std::vector<double> f, y;
  for (int i = 0; i < 400; ++i) {
    f.push_back(-50 + 0.25 * i);
    y.push_back(std::exp(-4 * std::log(2.0) * f.back() * f.back() / 100.0));
  }
  const auto fit = fit_ple_spectrum(f, y, 3);
  CHECK(fit.flagged);
}
