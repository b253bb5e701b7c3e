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

#include "sivsim/level_system.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sivsim/units.hpp"

namespace sivsim {

std::string_view to_string(Transition tr) {
  switch (tr) {
    case Transition::A: return "A";
    case Transition::B: return "B";
    case Transition::C: return "C";
    case Transition::D: return "D";
  }
  return "?";
}

Transition transition_from_string(std::string_view name) {
  if (name == "A") return Transition::A;
  if (name == "B") return Transition::B;
  if (name == "C") return Transition::C;
  if (name == "D") return Transition::D;
  throw std::invalid_argument("unknown transition '" + std::string(name) + "' (expected A, B, C or D)");
}

double boltzmann_ratio(double temperature_k, double splitting_ghz) {
  if (!(temperature_k > 0.0)) throw std::invalid_argument("temperature must be > 0");
  return std::exp(-kPlanck * splitting_ghz * 1e9 / (kBoltzmann * temperature_k));
}

LevelSystem::LevelSystem(double ground_splitting_ghz, double excited_splitting_ghz, const RateMatrix& rates)
    : ground_splitting_ghz_(ground_splitting_ghz), excited_splitting_ghz_(excited_splitting_ghz), rates_(rates) {
  if (!(ground_splitting_ghz > 0.0) || !(excited_splitting_ghz > 0.0))
    throw std::invalid_argument("level splittings must be > 0");
  for (int i = 0; i < kLevels; ++i) {
    for (int j = 0; j < kLevels; ++j) {
      const double r = rates(i, j);
      if (!std::isfinite(r) || r < 0.0)
        throw std::invalid_argument("rate (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                    ") must be finite and >= 0");
      // Optical-frequency thermal excitation is negligible at cryogenic
      // temperatures, so ground -> excited transfer is not a valid input.
      if (i != j && !is_excited(i) && is_excited(j) && r != 0.0)
        throw std::invalid_argument("ground -> excited rates are not supported");
    }
  }
}

LevelSystem LevelSystem::siv(const RateDefaults& d, double ground_splitting_ghz, double excited_splitting_ghz) {
  if (!(d.excited_lifetime_ns > 0.0) || !(d.orbital_t1_ns > 0.0))
    throw std::invalid_argument("lifetimes must be > 0");
  RateMatrix rates = RateMatrix::Zero();
  const double per_channel = 0.5 / d.excited_lifetime_ns;
  for (int e : {kExcited3, kExcited4}) {
    rates(e, kGround1) = per_channel;
    rates(e, kGround2) = per_channel;
  }
  // Detailed balance: down + up = 1/T1, up / down = Boltzmann ratio.
  const double rg = boltzmann_ratio(d.temperature_k, ground_splitting_ghz);
  const double ground_sum = 1.0 / d.orbital_t1_ns;
  rates(kGround2, kGround1) = ground_sum / (1.0 + rg);
  rates(kGround1, kGround2) = ground_sum * rg / (1.0 + rg);

  if (d.excited_orbital_relaxation_per_ns > 0.0) {
    const double re = boltzmann_ratio(d.temperature_k, excited_splitting_ghz);
    rates(kExcited4, kExcited3) = d.excited_orbital_relaxation_per_ns;
    rates(kExcited3, kExcited4) = d.excited_orbital_relaxation_per_ns * re;
  }
  rates(kGround1, kGround1) = rates(kGround2, kGround2) = d.ground_pure_dephasing_per_ns;
  rates(kExcited3, kExcited3) = rates(kExcited4, kExcited4) = d.excited_pure_dephasing_per_ns;
  return LevelSystem(ground_splitting_ghz, excited_splitting_ghz, rates);
}

double LevelSystem::total_rate(int level) const { return rates_.row(level).sum(); }

double LevelSystem::radiative_rate(int excited_level) const {
  return rates_(excited_level, kGround1) + rates_(excited_level, kGround2);
}

double LevelSystem::level_energy_ghz(int level) const {
  switch (level) {
    case kGround1: return 0.0;
    case kGround2: return ground_splitting_ghz_;
    case kExcited3: return 0.0;
    case kExcited4: return excited_splitting_ghz_;
  }
  throw std::out_of_range("level index");
}

LevelSystem LevelSystem::with_rates(const RateMatrix& rates) const {
  return LevelSystem(ground_splitting_ghz_, excited_splitting_ghz_, rates);
}

LevelSystem LevelSystem::without_decoherence() const { return with_rates(RateMatrix::Zero()); }

}  // namespace sivsim
