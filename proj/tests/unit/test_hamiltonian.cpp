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

#include <random>

#include <catch_amalgamated.hpp>

#include "sivsim/hamiltonian.hpp"
#include "sivsim/units.hpp"

using namespace sivsim;
using Catch::Matchers::WithinAbs;

namespace {
const LevelSystem kSys = LevelSystem::siv();
}

TEST_CASE("single drive: coupling Omega/2 e^{i phi} and detuning on the excited level") {
  const auto d = square_pulse(3.0, 1.0, 0.0, Transition::C, 2.0, 0.4);
  const auto h = build_rwa_hamiltonian(kSys, {d}, 0.0, 0.5);
  CHECK_THAT(std::abs(h(kGround1, kExcited3) - std::polar(1.5, 0.4)), WithinAbs(0.0, 1e-14));
  CHECK_THAT(h(kExcited3, kExcited3).real() - h(kGround1, kGround1).real(), WithinAbs(-kTwoPi * 2.0, 1e-12));
  CHECK(h.isApprox(h.adjoint()));
}

TEST_CASE("emitter detuning shifts both excited levels") {
  const auto d = square_pulse(1.0, 1.0, 0.0, Transition::A);
  const auto h0 = build_rwa_hamiltonian(kSys, {d}, 0.0, 0.5);
  const auto h1 = build_rwa_hamiltonian(kSys, {d}, 1.5, 0.5);
  CHECK_THAT(h1(kExcited3, kExcited3).real() - h0(kExcited3, kExcited3).real(), WithinAbs(-kTwoPi * 1.5, 1e-12));
  CHECK_THAT(h1(kExcited4, kExcited4).real() - h0(kExcited4, kExcited4).real(), WithinAbs(-kTwoPi * 1.5, 1e-12));
  CHECK(h1(kGround1, kGround1) == h0(kGround1, kGround1));
}

TEST_CASE("Raman pair leaves the two-photon detuning on |2>") {
  RamanPairParams p;
  p.common_detuning_ghz = 70.0;
  p.two_photon_detuning_ghz = 5.0;
  p.signal_area_rad = 1.0;
  p.control_area_rad = 1.0;
  RwaFrame frame(kSys, raman_pair(p, 1.0));
  const auto& diag = frame.diagonal();
  CHECK(diag[kGround1] == 0.0);
  CHECK_THAT(diag[kExcited4], WithinAbs(-kTwoPi * 70.0, 1e-9));
  // Control on B carries Delta + delta2: H22 = H44 + 2 pi (Delta + delta2).
  CHECK_THAT(diag[kGround2], WithinAbs(kTwoPi * 5.0, 1e-9));
}

TEST_CASE("frame conflicts are rejected") {
  const auto a = square_pulse(1.0, 1.0, 0.0, Transition::C, 0.0);
  const auto b = square_pulse(1.0, 1.0, 2.0, Transition::C, 1.0);
  CHECK_THROWS_AS(RwaFrame(kSys, {a, b}), std::invalid_argument);
  // Loop A, B, C, D with detunings that do not close.
  std::vector<DriveField> loop = {square_pulse(1, 1, 0, Transition::A, 0.0), square_pulse(1, 1, 0, Transition::B, 0.0),
                                  square_pulse(1, 1, 0, Transition::C, 0.0), square_pulse(1, 1, 0, Transition::D, 3.0)};
  CHECK_THROWS_AS(RwaFrame(kSys, loop), std::invalid_argument);
  loop[3] = square_pulse(1, 1, 0, Transition::D, 0.0);
  CHECK_NOTHROW(RwaFrame(kSys, loop));
}

TEST_CASE("Hamiltonian is Hermitian for random drive sets") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    std::vector<DriveField> drives = {gaussian_pulse(std::abs(u(rng)) + 0.1, 0.2, 0.5, Transition::C, u(rng), u(rng)),
                                      gaussian_pulse(std::abs(u(rng)) + 0.1, 0.2, 0.5, Transition::B, u(rng), u(rng))};
    const auto h = build_rwa_hamiltonian(kSys, drives, u(rng), 0.5 + 0.1 * u(rng));
    CHECK((h - h.adjoint()).norm() < 1e-13);
  }
}
