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

#include <catch_amalgamated.hpp>

#include "sivsim/pulses.hpp"
#include "sivsim/units.hpp"

using namespace sivsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gaussian envelope: peak, FWHM and area") {
  const double area = 1.3, fwhm = 0.012;
  const auto p = gaussian_pulse(area, fwhm, 0.1, Transition::C);
  // integral of exp(-4 ln2 t^2 / w^2) dt = w sqrt(pi / (4 ln 2))
  const double peak = area / (fwhm * std::sqrt(kPi / (4.0 * std::log(2.0))));
  CHECK_THAT(p.peak_rabi(), WithinRel(peak, 1e-12));
  CHECK_THAT(gaussian_peak_rabi(area, fwhm), WithinRel(peak, 1e-12));
  CHECK_THAT(p.rabi(0.1 + fwhm / 2), WithinRel(peak / 2, 1e-12));
  CHECK_THAT(pulse_area(p), WithinRel(area, 1e-9));
  CHECK(p.window_start_ns() < 0.1 - 2 * fwhm);
  CHECK(p.rabi(p.window_stop_ns() + 1e-6) == 0.0);
}

TEST_CASE("sech and square envelopes carry the requested area") {
  const auto s = sech_pulse(kPi, 0.05, 1.0, Transition::A);
  CHECK_THAT(pulse_area(s), WithinRel(kPi, 1e-7));
  CHECK_THAT(s.rabi(1.0 + 0.025), WithinRel(s.peak_rabi() / 2, 1e-12));
  const auto q = square_pulse(2.0, 3.0, 1.0, Transition::D);
  CHECK_THAT(pulse_area(q), WithinRel(6.0, 1e-12));
  CHECK(q.rabi(0.999) == 0.0);
  CHECK(q.rabi(2.0) == 2.0);
}

TEST_CASE("shifting and rephasing") {
  const auto p = gaussian_pulse(1.0, 0.1, 0.5, Transition::C, 2.0, 0.3);
  const auto q = p.shifted(1.0).with_phase(1.2);
  CHECK(q.center_ns() == 1.5);
  CHECK(q.phase_rad() == 1.2);
  CHECK(q.carrier_detuning_ghz() == 2.0);
  CHECK_THAT(q.rabi(1.5), WithinRel(p.rabi(0.5), 1e-15));
}

TEST_CASE("timeline edges, breakpoints and dephasing windows") {
  PulseTimeline tl;
  tl.add(square_pulse(1.0, 1.0, 2.0, Transition::C));
  tl.add(square_pulse(1.0, 1.0, 0.0, Transition::C));
  tl.add_dephasing({0.5, 2.5, 0.45});
  CHECK(tl.start_ns() == 0.0);
  CHECK(tl.stop_ns() == 3.0);
  const auto bp = tl.breakpoints();
  CHECK(std::is_sorted(bp.begin(), bp.end()));
  CHECK(std::adjacent_find(bp.begin(), bp.end()) == bp.end());
  CHECK_THAT(tl.excess_dephasing_rate(1.0), WithinRel(kTwoPi * 0.45, 1e-15));
  CHECK(tl.excess_dephasing_rate(2.75) == 0.0);
  CHECK_THROWS_AS(tl.add_dephasing({1.0, 0.5, 0.1}), std::invalid_argument);
  // Same transition, different carrier, overlapping windows.
  CHECK_THROWS_AS(tl.add(square_pulse(1.0, 1.0, 0.5, Transition::C, 3.0)), std::invalid_argument);
  CHECK(PulseTimeline().start_ns() == 0.0);
}

TEST_CASE("Raman pair layout") {
  RamanPairParams p;
  p.common_detuning_ghz = 70.0;
  p.two_photon_detuning_ghz = 3.0;
  p.relative_delay_ns = 0.02;
  p.signal_area_rad = 2.0;
  p.control_area_rad = 4.0;
  const auto pair = raman_pair(p, 1.0);
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].transition() == Transition::A);
  CHECK(pair[1].transition() == Transition::B);
  CHECK(pair[0].carrier_detuning_ghz() == 70.0);
  CHECK(pair[1].carrier_detuning_ghz() == 73.0);
  CHECK_THAT(pair[1].center_ns() - pair[0].center_ns(), WithinAbs(0.02, 1e-15));
  CHECK_THAT(pulse_area(pair[1]), WithinRel(4.0, 1e-9));
  p.signal_area_rad = 0.0;
  CHECK(raman_pair(p, 1.0).size() == 1);
  CHECK(raman_detuning_warning(70.0, 10.0) == std::nullopt);
  CHECK(raman_detuning_warning(20.0, 10.0).has_value());
}

TEST_CASE("invalid pulse parameters") {
  CHECK_THROWS_AS(gaussian_pulse(1.0, 0.0, 0.0, Transition::C), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_pulse(-1.0, 0.1, 0.0, Transition::C), std::invalid_argument);
  CHECK_THROWS_AS(square_pulse(1.0, -1.0, 0.0, Transition::C), std::invalid_argument);
}

TEST_CASE("pulse area round trip up to ten pi") {
  for (int i = 0; i <= 20; ++i) {
    const double area = kPi * i / 2.0;
    CHECK_THAT(pulse_area(gaussian_pulse(area, 0.012, 0.1, Transition::C)), WithinAbs(area, 1e-9));
    CHECK_THAT(pulse_area(sech_pulse(area, 0.012, 0.1, Transition::C)), WithinAbs(area, 1e-9));
  }
}
