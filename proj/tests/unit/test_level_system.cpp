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

#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sivsim/density_matrix.hpp"
#include "sivsim/level_system.hpp"

using namespace sivsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("transition labels map to the double-Lambda levels") {
  CHECK(levels_of(Transition::A).ground == kGround1);
  CHECK(levels_of(Transition::A).excited == kExcited4);
  CHECK(levels_of(Transition::B).ground == kGround2);
  CHECK(levels_of(Transition::B).excited == kExcited4);
  CHECK(levels_of(Transition::C).ground == kGround1);
  CHECK(levels_of(Transition::C).excited == kExcited3);
  CHECK(levels_of(Transition::D).ground == kGround2);
  CHECK(levels_of(Transition::D).excited == kExcited3);
  for (auto tr : {Transition::A, Transition::B, Transition::C, Transition::D})
    CHECK(transition_from_string(to_string(tr)) == tr);
  CHECK_THROWS_AS(transition_from_string("E"), std::invalid_argument);
}

TEST_CASE("thermal ground state matches the Boltzmann doublet") {
  const auto rho = thermal_ground_state(5.0, 48.0);
  CHECK_THAT(population(rho, kGround2), WithinAbs(oracle::thermal_upper(5.0, 48.0), 1e-12));
  CHECK_THAT(population(rho, kGround2), WithinAbs(0.3868, 1e-4));
  CHECK_THAT(rho.trace().real(), WithinAbs(1.0, 1e-15));
  CHECK(population(rho, kExcited3) == 0.0);
  CHECK(population(rho, kExcited4) == 0.0);
  CHECK(satisfies(validate_state(rho)));
}

TEST_CASE("thermal population is monotone in temperature and bounded by one half") {
  double last = 0.0;
  for (double t = 0.5; t < 400.0; t *= 1.7) {
    const double p = population(thermal_ground_state(t, 48.0), kGround2);
    CHECK(p > last);
    CHECK(p < 0.5);
    last = p;
  }
  CHECK_THROWS_AS(boltzmann_ratio(0.0, 48.0), std::invalid_argument);
}

TEST_CASE("default rates: radiative split and detailed balance") {
  const auto sys = LevelSystem::siv();
  const auto& r = sys.rates();
  for (int e : {kExcited3, kExcited4}) {
    CHECK_THAT(r(e, kGround1), WithinRel(0.5 / 1.7, 1e-14));
    CHECK_THAT(r(e, kGround2), WithinRel(0.5 / 1.7, 1e-14));
    CHECK_THAT(sys.radiative_rate(e), WithinRel(1.0 / 1.7, 1e-14));
  }
  CHECK_THAT(r(kGround2, kGround1) + r(kGround1, kGround2), WithinRel(1.0 / 27.0, 1e-14));
  const double ratio = r(kGround1, kGround2) / r(kGround2, kGround1);
  const double p = oracle::thermal_upper(5.0, 48.0);
  CHECK_THAT(ratio, WithinRel(p / (1.0 - p), 1e-12));
}

TEST_CASE("custom splittings feed the Boltzmann factor") {
  const auto sys = LevelSystem::siv({}, 60.0, 300.0);
  CHECK(sys.ground_splitting_ghz() == 60.0);
  CHECK(sys.level_energy_ghz(kGround2) == 60.0);
  CHECK(sys.level_energy_ghz(kExcited4) == 300.0);
  const double ratio = sys.rates()(kGround1, kGround2) / sys.rates()(kGround2, kGround1);
  const double p = oracle::thermal_upper(5.0, 60.0);
  CHECK_THAT(ratio, WithinRel(p / (1.0 - p), 1e-12));
}

TEST_CASE("excited relaxation and pure dephasing land on the right entries") {
  RateDefaults d;
  d.excited_orbital_relaxation_per_ns = 2.0;
  d.ground_pure_dephasing_per_ns = 0.3;
  d.excited_pure_dephasing_per_ns = 0.7;
  const auto sys = LevelSystem::siv(d);
  const auto& r = sys.rates();
  CHECK(r(kExcited4, kExcited3) == 2.0);
  const double pe = oracle::thermal_upper(5.0, 259.0);
  CHECK_THAT(r(kExcited3, kExcited4), WithinRel(2.0 * pe / (1.0 - pe), 1e-12));
  CHECK(r(kGround1, kGround1) == 0.3);
  CHECK(r(kExcited4, kExcited4) == 0.7);
  CHECK(sys.without_decoherence().rates().isZero());
}

TEST_CASE("level system rejects unphysical input") {
  RateMatrix r = RateMatrix::Zero();
  CHECK_THROWS_AS(LevelSystem(0.0, 259.0, r), std::invalid_argument);
  r(kGround1, kExcited3) = 1.0;
  CHECK_THROWS_AS(LevelSystem(48.0, 259.0, r), std::invalid_argument);
  r.setZero();
  r(kExcited3, kGround1) = -1.0;
  CHECK_THROWS_AS(LevelSystem(48.0, 259.0, r), std::invalid_argument);
  RateDefaults d;
  d.excited_lifetime_ns = 0.0;
  CHECK_THROWS_AS(LevelSystem::siv(d), std::invalid_argument);
}
