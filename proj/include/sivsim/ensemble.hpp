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

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sivsim/density_matrix.hpp"
#include "sivsim/integrator.hpp"
#include "sivsim/level_system.hpp"
#include "sivsim/pulses.hpp"

namespace sivsim {

enum class SamplingMethod { kGaussHermite, kUniformGrid, kMonteCarlo };

std::string_view to_string(SamplingMethod m);
SamplingMethod sampling_method_from_string(std::string_view name);

/// Gaussian inhomogeneous distribution of emitter detunings.
struct EnsembleSpec {
  double fwhm_ghz = 10.0;
  int n_emitters = 10;
  SamplingMethod method = SamplingMethod::kGaussHermite;
  std::uint64_t seed = 0;  // monte-carlo only

  static constexpr int kMaxGaussHermiteNodes = 64;

  double sigma_ghz() const;
  void validate() const;
};

struct DetuningNode {
  double detuning_ghz;
  double weight;
};

/// Nodes and normalized weights.
///   gauss-hermite: Golub-Welsch nodes for N(0, sigma^2); exact for
///                  polynomial moments up to degree 2n - 1.
///   uniform-grid:  midpoints of n equal cells on [-3 sigma, 3 sigma],
///                  weighted by the Gaussian amplitude.
///   monte-carlo:   n draws from N(0, sigma^2), equal weights.
std::vector<DetuningNode> detuning_nodes(const EnsembleSpec& spec);

/// Evolution failure of one ensemble member. `solver_failure` is set when
/// the underlying error was a SolverError.
class EnsembleError : public std::runtime_error {
 public:
  EnsembleError(const std::string& what, std::size_t node, bool solver_failure)
      : std::runtime_error(what), node_(node), solver_failure_(solver_failure) {}
  std::size_t node() const noexcept { return node_; }
  bool solver_failure() const noexcept { return solver_failure_; }

 private:
  std::size_t node_;
  bool solver_failure_;
};

/// Run body(0..n-1) on up to `threads` workers (<= 0: hardware
/// concurrency). If any call throws, the exception of the lowest failing
/// index is rethrown after all workers have finished.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Rethrow the active exception as an EnsembleError naming the node.
[[noreturn]] void rethrow_for_node(std::size_t node, double detuning_ghz);

/// Evaluate `per_node` for every node (in parallel when threads != 1) and
/// return the weighted sum of the returned vectors. The reduction runs in
/// node order, so the result does not depend on the thread count.
/// threads <= 0 selects the hardware concurrency.
using NodeFunction = std::function<std::vector<double>(const DetuningNode& node, std::size_t index)>;
std::vector<double> ensemble_average(const std::vector<DetuningNode>& nodes, const NodeFunction& per_node,
                                     int threads);

struct Observable {
  std::string name;
  std::function<double(const DensityMatrix&)> value;
};

struct EnsembleTraces {
  std::vector<double> times;
  std::vector<std::string> names;
  /// values[observable][sample]
  std::vector<std::vector<double>> values;
};

/// Per-node `evolve` followed by the weighted average of the observables at
/// options.sample_times.
EnsembleTraces ensemble_run(const LevelSystem& system, const PulseTimeline& timeline, const EnsembleSpec& spec,
                            const DensityMatrix& rho0, double t0_ns, double t1_ns,
                            const std::vector<Observable>& observables, const EvolveOptions& options = {},
                            int threads = 1);

/// Weighted-average density matrix at t1 (used by the hygiene checks).
DensityMatrix ensemble_final_state(const LevelSystem& system, const PulseTimeline& timeline,
                                   const EnsembleSpec& spec, const DensityMatrix& rho0, double t0_ns,
                                   double t1_ns, const EvolveOptions& options = {}, int threads = 1);

}  // namespace sivsim
