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

#include "oracles.hpp"
#include "sivsim/lindblad.hpp"

using namespace sivsim;

namespace {

DensityMatrix random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix4cd a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = {g(rng), g(rng)};
  DensityMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

Hamiltonian random_hermitian(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix4cd a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = {g(rng), g(rng)};
  return a + a.adjoint();
}

RateMatrix random_rates(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  RateMatrix r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = (!is_excited(i) && is_excited(j)) ? 0.0 : u(rng);
  return r;
}

}  // namespace

TEST_CASE("right-hand side matches the Kronecker-product Liouvillian") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 30; ++k) {
    const auto rho = random_state(rng);
    const auto h = random_hermitian(rng);
    const auto r = random_rates(rng);
    const auto mine = lindblad_rhs(rho, h, r);
    const oracle::Vec16 v = oracle::liouvillian(h, r) * Eigen::Map<const oracle::Vec16>(rho.data());
    const oracle::Mat4 ref = Eigen::Map<const oracle::Mat4>(v.data());
    CHECK((mine - ref).norm() < 1e-12 * (1.0 + ref.norm()));
  }
}

TEST_CASE("generator is traceless and Hermiticity preserving") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 100; ++k) {
    const auto d = lindblad_rhs(random_state(rng), random_hermitian(rng), random_rates(rng));
    CHECK(std::abs(d.trace()) < 1e-12);
    CHECK((d - d.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("extra excited dephasing equals raising the diagonal rates") {
  std::mt19937_64 rng(13);
  const auto rho = random_state(rng);
  const auto h = random_hermitian(rng);
  RateMatrix r = random_rates(rng);
  DensityMatrix a, b;
  lindblad_rhs_into(rho, h, r, 0.8, a);
  r(kExcited3, kExcited3) += 0.8;
  r(kExcited4, kExcited4) += 0.8;
  lindblad_rhs_into(rho, h, r, 0.0, b);
  CHECK((a - b).norm() < 1e-13);
}

TEST_CASE("spontaneous decay and pure dephasing rates") {
  RateMatrix r = RateMatrix::Zero();
  r(kExcited3, kGround1) = 0.4;
  r(kExcited3, kGround2) = 0.6;
  r(kGround1, kGround1) = 0.5;
  DensityMatrix rho = DensityMatrix::Zero();
  rho(kExcited3, kExcited3) = 1.0;
  auto d = lindblad_rhs(rho, Hamiltonian::Zero(), r);
  CHECK(std::abs(d(kExcited3, kExcited3) + 1.0) < 1e-15);
  CHECK(std::abs(d(kGround1, kGround1) - 0.4) < 1e-15);
  CHECK(std::abs(d(kGround2, kGround2) - 0.6) < 1e-15);
  // Coherence between |1> and |3> decays at (Gamma_1 + Gamma_3) / 2.
  rho.setZero();
  rho(kGround1, kExcited3) = 1.0;
  d = lindblad_rhs(rho, Hamiltonian::Zero(), r);
  CHECK(std::abs(d(kGround1, kExcited3) + 0.5 * (0.5 + 1.0)) < 1e-15);
}
