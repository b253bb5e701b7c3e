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

#include "sivsim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "sivsim/errors.hpp"
#include "sivsim/units.hpp"

namespace sivsim {

std::string_view to_string(SamplingMethod m) {
  switch (m) {
    case SamplingMethod::kGaussHermite: return "gauss-hermite";
    case SamplingMethod::kUniformGrid: return "uniform-grid";
    case SamplingMethod::kMonteCarlo: return "monte-carlo";
  }
  return "?";
}

SamplingMethod sampling_method_from_string(std::string_view name) {
  if (name == "gauss-hermite") return SamplingMethod::kGaussHermite;
  if (name == "uniform-grid") return SamplingMethod::kUniformGrid;
  if (name == "monte-carlo") return SamplingMethod::kMonteCarlo;
  throw std::invalid_argument("unknown sampling method '" + std::string(name) +
                              "' (expected gauss-hermite, uniform-grid or monte-carlo)");
}

double EnsembleSpec::sigma_ghz() const { return fwhm_ghz / kFwhmPerSigma; }

void EnsembleSpec::validate() const {
  if (!(fwhm_ghz > 0.0) || !std::isfinite(fwhm_ghz)) throw std::invalid_argument("ensemble fwhm must be > 0");
  if (n_emitters < 1) throw std::invalid_argument("ensemble needs at least one emitter");
  if (method == SamplingMethod::kGaussHermite && n_emitters > kMaxGaussHermiteNodes)
    throw std::invalid_argument("gauss-hermite quadrature is limited to 64 nodes");
}

namespace {

// Golub-Welsch for the probabilists' weight exp(-x^2 / 2): the Jacobi
// matrix has zero diagonal and off-diagonal sqrt(k).
std::vector<DetuningNode> gauss_hermite(int n, double sigma) {
  if (n == 1) return {{0.0, 1.0}};
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  std::vector<DetuningNode> nodes(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    nodes[i] = {solver.eigenvalues()(i) * sigma, v0 * v0};
  }
  // Enforce exact mirror symmetry and unit weight sum.
  for (int i = 0; i < n / 2; ++i) {
    auto& lo = nodes[i];
    auto& hi = nodes[n - 1 - i];
    const double x = 0.5 * (hi.detuning_ghz - lo.detuning_ghz);
    const double w = 0.5 * (hi.weight + lo.weight);
    lo = {-x, w};
    hi = {x, w};
  }
  if (n % 2 == 1) nodes[n / 2].detuning_ghz = 0.0;
  double sum = 0.0;
  for (const auto& nd : nodes) sum += nd.weight;
  for (auto& nd : nodes) nd.weight /= sum;
  return nodes;
}

std::vector<DetuningNode> uniform_grid(int n, double sigma) {
  if (n == 1) return {{0.0, 1.0}};
  const double half = 3.0 * sigma;
  const double cell = 2.0 * half / n;
  std::vector<DetuningNode> nodes(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -half + (i + 0.5) * cell;
    const double w = std::exp(-0.5 * (x / sigma) * (x / sigma));
    nodes[i] = {x, w};
    sum += w;
  }
  for (int i = 0; i < n / 2; ++i) nodes[n - 1 - i].detuning_ghz = -nodes[i].detuning_ghz;
  if (n % 2 == 1) nodes[n / 2].detuning_ghz = 0.0;
  for (auto& nd : nodes) nd.weight /= sum;
  return nodes;
}

std::vector<DetuningNode> monte_carlo(int n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<DetuningNode> nodes(n);
  for (auto& nd : nodes) nd = {dist(rng), 1.0 / n};
  return nodes;
}

}  // namespace

std::vector<DetuningNode> detuning_nodes(const EnsembleSpec& spec) {
  spec.validate();
  const double sigma = spec.sigma_ghz();
  switch (spec.method) {
    case SamplingMethod::kGaussHermite: return gauss_hermite(spec.n_emitters, sigma);
    case SamplingMethod::kUniformGrid: return uniform_grid(spec.n_emitters, sigma);
    case SamplingMethod::kMonteCarlo: return monte_carlo(spec.n_emitters, sigma, spec.seed);
  }
  return {};
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void rethrow_for_node(std::size_t node, double detuning_ghz) {
  std::ostringstream os;
  os << "ensemble node " << node << " (detuning " << detuning_ghz << " GHz): ";
  try {
    throw;
  } catch (const EnsembleError&) {
    throw;
  } catch (const SolverError& e) {
    os << e.what();
    throw EnsembleError(os.str(), node, true);
  } catch (const std::exception& e) {
    os << e.what();
    throw EnsembleError(os.str(), node, false);
  }
}

std::vector<double> ensemble_average(const std::vector<DetuningNode>& nodes, const NodeFunction& per_node,
                                     int threads) {
  const std::size_t n = nodes.size();
  std::vector<std::vector<double>> results(n);
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      results[i] = per_node(nodes[i], i);
    } catch (...) {
      rethrow_for_node(i, nodes[i].detuning_ghz);
    }
  });

  // Ordered reduction: bit-identical for any thread count.
  std::vector<double> sum(n ? results[0].size() : 0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i].size() != sum.size()) throw std::logic_error("ensemble node results differ in length");
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += nodes[i].weight * results[i][k];
  }
  return sum;
}

EnsembleTraces ensemble_run(const LevelSystem& system, const PulseTimeline& timeline, const EnsembleSpec& spec,
                            const DensityMatrix& rho0, double t0, double t1,
                            const std::vector<Observable>& observables, const EvolveOptions& options,
                            int threads) {
  const auto nodes = detuning_nodes(spec);
  EnsembleTraces out;
  for (const auto& o : observables) out.names.push_back(o.name);
  std::vector<double> times;

  auto per_node = [&](const DetuningNode& node, std::size_t) {
    const auto traj = evolve(rho0, system, timeline, t0, t1, options, node.detuning_ghz);
    std::vector<double> flat;
    flat.reserve(observables.size() * traj.states.size());
    for (const auto& o : observables)
      for (const auto& rho : traj.states) flat.push_back(o.value(rho));
    return flat;
  };
  const auto flat = ensemble_average(nodes, per_node, threads);

  out.times = options.sample_times.empty() ? std::vector<double>{t0, t1} : options.sample_times;
  const std::size_t m = out.times.size();
  out.values.resize(observables.size());
  for (std::size_t k = 0; k < observables.size(); ++k)
    out.values[k].assign(flat.begin() + static_cast<std::ptrdiff_t>(k * m),
                         flat.begin() + static_cast<std::ptrdiff_t>((k + 1) * m));
  return out;
}

DensityMatrix ensemble_final_state(const LevelSystem& system, const PulseTimeline& timeline,
                                   const EnsembleSpec& spec, const DensityMatrix& rho0, double t0, double t1,
                                   const EvolveOptions& options, int threads) {
  EvolveOptions opt = options;
  opt.sample_times.clear();
  auto per_node = [&](const DetuningNode& node, std::size_t) {
    const auto rho = evolve(rho0, system, timeline, t0, t1, opt, node.detuning_ghz).final_state();
    std::vector<double> flat(32);
    for (int i = 0; i < 16; ++i) {
      flat[2 * i] = rho(i).real();
      flat[2 * i + 1] = rho(i).imag();
    }
    return flat;
  };
  const auto flat = ensemble_average(detuning_nodes(spec), per_node, threads);
  DensityMatrix rho;
  for (int i = 0; i < 16; ++i) rho(i) = {flat[2 * i], flat[2 * i + 1]};
  return rho;
}

}  // namespace sivsim
