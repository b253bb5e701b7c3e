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

#include "sivsim/hamiltonian.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "sivsim/units.hpp"

namespace sivsim {
namespace {

struct Edge {
  int ground;
  int excited;
  double detuning_ghz;
};

}  // namespace

RwaFrame::RwaFrame(const LevelSystem& /*system*/, const std::vector<DriveField>& drives) {
  std::array<std::optional<double>, 4> carrier;  // indexed by Transition
  std::vector<Edge> edges;
  for (const auto& d : drives) {
    const auto idx = static_cast<std::size_t>(d.transition());
    if (carrier[idx]) {
      if (*carrier[idx] != d.carrier_detuning_ghz()) {
        std::ostringstream os;
        os << "conflicting rotating frame: transition " << to_string(d.transition())
           << " is driven with carriers " << *carrier[idx] << " GHz and " << d.carrier_detuning_ghz() << " GHz";
        throw std::invalid_argument(os.str());
      }
      continue;
    }
    carrier[idx] = d.carrier_detuning_ghz();
    const auto lv = levels_of(d.transition());
    edges.push_back({lv.ground, lv.excited, d.carrier_detuning_ghz()});
  }

  // Breadth-first assignment of frame energies. H_ee = H_gg - 2 pi d.
  std::array<std::optional<double>, kLevels> value;
  for (int root = 0; root < kLevels; ++root) {
    if (value[root]) continue;
    value[root] = 0.0;
    std::vector<int> queue{root};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int level = queue[q];
      for (const auto& e : edges) {
        int other = -1;
        double expected = 0.0;
        if (e.ground == level) {
          other = e.excited;
          expected = *value[level] - kTwoPi * e.detuning_ghz;
        } else if (e.excited == level) {
          other = e.ground;
          expected = *value[level] + kTwoPi * e.detuning_ghz;
        } else {
          continue;
        }
        if (!value[other]) {
          value[other] = expected;
          queue.push_back(other);
        } else if (std::abs(*value[other] - expected) > 1e-9 * (1.0 + std::abs(expected))) {
          throw std::invalid_argument(
              "conflicting rotating frame: the driven transitions form a loop whose carrier detunings do not close");
        }
      }
    }
  }
  for (int i = 0; i < kLevels; ++i) diagonal_[i] = *value[i];
}

void RwaFrame::assemble(const std::vector<DriveField>& drives, double emitter_detuning_ghz, double t,
                        Hamiltonian& h) const {
  h.setZero();
  const double shift = -kTwoPi * emitter_detuning_ghz;
  for (int i = 0; i < kLevels; ++i) h(i, i) = diagonal_[i] + (is_excited(i) ? shift : 0.0);
  for (const auto& d : drives) {
    const double omega = d.rabi(t);
    if (omega == 0.0) continue;
    const auto lv = levels_of(d.transition());
    const std::complex<double> coupling = 0.5 * omega * std::polar(1.0, d.phase_rad());
    h(lv.ground, lv.excited) += coupling;
    h(lv.excited, lv.ground) += std::conj(coupling);
  }
}

Hamiltonian build_rwa_hamiltonian(const LevelSystem& system, const std::vector<DriveField>& drives,
                                  double emitter_detuning_ghz, double t) {
  RwaFrame frame(system, drives);
  Hamiltonian h;
  frame.assemble(drives, emitter_detuning_ghz, t, h);
  return h;
}

}  // namespace sivsim
