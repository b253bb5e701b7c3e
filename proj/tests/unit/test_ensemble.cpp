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

#include <atomic>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sivsim/ensemble.hpp"
#include "sivsim/units.hpp"

using namespace sivsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double moment(const std::vector<DetuningNode>& nodes, int k) {
  double s = 0.0;
  for (const auto& n : nodes) s += n.weight * std::pow(n.detuning_ghz, k);
  return s;
}

double double_factorial(int n) { return n <= 1 ? 1.0 : n * double_factorial(n - 2); }

}  // namespace

TEST_CASE("Gauss-Hermite nodes reproduce Gaussian moments") {
  for (int n : {1, 2, 5, 10, 20, 64}) {
    EnsembleSpec spec;
    spec.n_emitters = n;
    const auto nodes = detuning_nodes(spec);
    REQUIRE(nodes.size() == static_cast<std::size_t>(n));
    const double sigma = spec.sigma_ghz();
    CHECK_THAT(moment(nodes, 0), WithinAbs(1.0, 1e-13));
    for (int k = 1; k < 2 * n && k <= 16; ++k) {
      const double exact = (k % 2) ? 0.0 : double_factorial(k - 1) * std::pow(sigma, k);
      // odd moments vanish; judge them against the size of the even neighbour
      const double scale = double_factorial(k - (k % 2 ? 0 : 1)) * std::pow(sigma, k);
      CHECK_THAT(moment(nodes, k), WithinAbs(exact, 1e-9 * std::max(1.0, scale)));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
      CHECK_THAT(nodes[i].detuning_ghz, WithinAbs(-nodes[nodes.size() - 1 - i].detuning_ghz, 1e-12));
  }
}

TEST_CASE("FWHM to sigma") {
  EnsembleSpec spec;
  spec.fwhm_ghz = 10.0;
  CHECK_THAT(spec.sigma_ghz(), WithinRel(10.0 / (2 * std::sqrt(2 * std::log(2.0))), 1e-14));
}

TEST_CASE("ten nodes track the Gaussian free-induction decay") {
  EnsembleSpec spec;
  const auto nodes = detuning_nodes(spec);
  for (double t = 0.0; t <= 0.12; t += 0.01) {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight * std::cos(kTwoPi * n.detuning_ghz * t);
    CHECK_THAT(s, WithinAbs(oracle::gaussian_fid(10.0, t), 2e-3));
  }
}

TEST_CASE("uniform grid and Monte Carlo samplers") {
  EnsembleSpec spec;
  spec.method = SamplingMethod::kUniformGrid;
  spec.n_emitters = 201;
  auto nodes = detuning_nodes(spec);
  CHECK_THAT(moment(nodes, 0), WithinAbs(1.0, 1e-13));
  // grid spans +-3 sigma, so compare with the truncated Gaussian
  const double phi3 = std::exp(-4.5) / std::sqrt(kTwoPi);
  const double truncated = std::pow(spec.sigma_ghz(), 2) * (1.0 - 6.0 * phi3 / std::erf(3.0 / std::sqrt(2.0)));
  CHECK_THAT(moment(nodes, 2), WithinRel(truncated, 1e-3));
  CHECK(nodes.front().detuning_ghz > -3 * spec.sigma_ghz());

  spec.method = SamplingMethod::kMonteCarlo;
  spec.n_emitters = 20000;
  spec.seed = 3;
  nodes = detuning_nodes(spec);
  CHECK_THAT(moment(nodes, 2), WithinRel(std::pow(spec.sigma_ghz(), 2), 3e-2));
  const auto again = detuning_nodes(spec);
  CHECK(again.front().detuning_ghz == nodes.front().detuning_ghz);
  spec.seed = 4;
  CHECK(detuning_nodes(spec).front().detuning_ghz != nodes.front().detuning_ghz);
}

TEST_CASE("invalid ensemble specs") {
  EnsembleSpec spec;
  spec.n_emitters = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.n_emitters = 65;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.n_emitters = 10;
  spec.fwhm_ghz = -1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  CHECK_THROWS_AS(sampling_method_from_string("sobol"), std::invalid_argument);
}

TEST_CASE("parallel_for visits every index and reports the lowest failure") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h == 1);
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 31) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail 7");
  }
}

TEST_CASE("ensemble averages are bitwise independent of the thread count") {
  EnsembleSpec spec;
  spec.n_emitters = 16;
  const auto sys = LevelSystem::siv();
  PulseTimeline tl({gaussian_pulse(kPi / 2, 0.012, 0.05, Transition::C), gaussian_pulse(kPi / 2, 0.012, 0.12, Transition::C)});
  const auto rho0 = thermal_ground_state(5.0, 48.0);
  const auto a = ensemble_final_state(sys, tl, spec, rho0, 0.0, 0.2, {}, 1);
  const auto b = ensemble_final_state(sys, tl, spec, rho0, 0.0, 0.2, {}, 4);
  CHECK(std::memcmp(a.data(), b.data(), sizeof(DensityMatrix)) == 0);
  CHECK(satisfies(validate_state(a)));
}

TEST_CASE("node failures name the ensemble member") {
  EnsembleSpec spec;
  EvolveOptions opt;
  opt.max_steps = 2;
  PulseTimeline tl({square_pulse(100.0, 5.0, 0.0, Transition::C)});
  try {
    ensemble_final_state(LevelSystem::siv(), tl, spec, pure_state(kGround1), 0.0, 5.0, opt, 2);
    FAIL("no exception");
  } catch (const EnsembleError& e) {
    CHECK(e.solver_failure());
    CHECK(e.node() == 0);
  }
}
