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

#include <array>
#include <string_view>

#include <Eigen/Dense>

namespace sivsim {

// Orbital levels, zero-based: |1> lower ground, |2> upper ground,
// |3> lower excited, |4> upper excited.
inline constexpr int kLevels = 4;
inline constexpr int kGround1 = 0;
inline constexpr int kGround2 = 1;
inline constexpr int kExcited3 = 2;
inline constexpr int kExcited4 = 3;

constexpr bool is_excited(int level) { return level >= kExcited3; }

/// The four zero-phonon lines of the double-Lambda scheme.
enum class Transition { A, B, C, D };

struct LevelPair {
  int ground;
  int excited;
};

/// A: |1>-|4>, B: |2>-|4>, C: |1>-|3>, D: |2>-|3>.
constexpr LevelPair levels_of(Transition tr) {
  switch (tr) {
    case Transition::A: return {kGround1, kExcited4};
    case Transition::B: return {kGround2, kExcited4};
    case Transition::C: return {kGround1, kExcited3};
    case Transition::D: return {kGround2, kExcited3};
  }
  return {kGround1, kExcited3};
}

std::string_view to_string(Transition tr);
Transition transition_from_string(std::string_view name);

/// Lindblad rates in 1/ns. Entry (i, j), i != j, is the population transfer
/// rate from level i to level j; entry (i, i) is the pure dephasing rate of
/// level i.
using RateMatrix = Eigen::Matrix4d;

struct RateDefaults {
  double excited_lifetime_ns = 1.7;
  double orbital_t1_ns = 27.0;
  double temperature_k = 5.0;
  double excited_pure_dephasing_per_ns = 0.0;
  double ground_pure_dephasing_per_ns = 0.0;
  /// |4> -> |3> phonon relaxation; the reverse rate follows detailed balance.
  double excited_orbital_relaxation_per_ns = 0.0;
};

/// Ground-doublet Boltzmann ratio rho22 / rho11.
double boltzmann_ratio(double temperature_k, double splitting_ghz);

class LevelSystem {
 public:
  LevelSystem(double ground_splitting_ghz, double excited_splitting_ghz, const RateMatrix& rates);

  static constexpr double kDefaultGroundSplittingGhz = 48.0;
  static constexpr double kDefaultExcitedSplittingGhz = 259.0;

  /// Level scheme with rates built from `defaults`: the excited lifetime is
  /// split equally between the two ground levels, the ground doublet relaxes
  /// with time constant orbital_t1_ns towards the thermal ratio at
  /// temperature_k.
  static LevelSystem siv(const RateDefaults& defaults = {},
                         double ground_splitting_ghz = kDefaultGroundSplittingGhz,
                         double excited_splitting_ghz = kDefaultExcitedSplittingGhz);

  double ground_splitting_ghz() const { return ground_splitting_ghz_; }
  double excited_splitting_ghz() const { return excited_splitting_ghz_; }
  const RateMatrix& rates() const { return rates_; }

  /// Sum over j of rates(i, j), including the pure-dephasing diagonal.
  double total_rate(int level) const;
  /// Spontaneous emission out of an excited level into the ground doublet.
  double radiative_rate(int excited_level) const;

  /// Energies relative to |1>, in GHz. The optical offset between the
  /// doublets is immaterial in the rotating frame and set to zero.
  double level_energy_ghz(int level) const;

  LevelSystem with_rates(const RateMatrix& rates) const;
  /// Copy with every rate zeroed: purely coherent dynamics.
  LevelSystem without_decoherence() const;

 private:
  double ground_splitting_ghz_;
  double excited_splitting_ghz_;
  RateMatrix rates_;
};

}  // namespace sivsim
