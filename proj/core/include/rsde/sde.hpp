// Copyright 2026 The rsde Authors
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
#include <optional>
#include <variant>
#include <vector>

#include "rsde/coefficients.hpp"
#include "rsde/geometry.hpp"
#include "rsde/measures.hpp"
#include "rsde/parallel.hpp"

namespace rsde::sde {

using geometry::Domain;
using geometry::ReflectionScheme;

struct ParticleEnsemble {
  double time = 0.0;
  std::uint64_t step = 0;
  int dim = 1;
  std::vector<double> positions;  // N x dim, row major
  std::vector<double> local_time;
  std::vector<double> tilde_local_time;
  std::vector<std::uint64_t> ids;  // RNG keys

  std::size_t size() const { return ids.size(); }
  Vec position(std::size_t i) const {
    return Vec::from_span({positions.data() + i * static_cast<std::size_t>(dim),
                           static_cast<std::size_t>(dim)});
  }
  void set_position(std::size_t i, const Vec& x) {
    for (int c = 0; c < dim; ++c) positions[i * static_cast<std::size_t>(dim) + c] = x[c];
  }
  EmpiricalMeasure measure() const;

  // One particle per atom (weights ignored), ids 0..N-1, zero local time.
  static ParticleEnsemble from_points(int dim, std::vector<double> coords);
};

struct MeasureFlow {
  std::vector<double> times;
  std::vector<EmpiricalMeasure> snapshots;
  // Simulation steps the snapshots were taken at.
  std::vector<std::uint64_t> steps;

  std::size_t size() const { return times.size(); }
  // Throws unless times are strictly increasing and atom counts constant.
  void validate() const;
  // Latest snapshot taken at or before the given simulation step.
  const EmpiricalMeasure& at_step(std::uint64_t step) const;
  // Latest snapshot with time <= t.
  const EmpiricalMeasure& at_time(double t) const;
};

// Uniform grid t_n = n h, last step shortened to land on T.
struct TimeGrid {
  double T = 1.0;
  double h = 1e-3;
  std::uint64_t steps = 0;

  static TimeGrid make(double T, double h);
  double time(std::uint64_t n) const { return n >= steps ? T : static_cast<double>(n) * h; }
  double dt(std::uint64_t n) const { return time(n + 1) - time(n); }
};

struct DiracInit {
  Vec point;
};
struct AtomsInit {
  EmpiricalMeasure atoms;  // N particles resampled cyclically from the atoms
};
struct UniformInit {};  // uniform on the closure (bounded domains)
struct GaussianInit {
  Vec mean;
  double sd = 1.0;  // conditioned on the closure by rejection
};
using InitialLaw = std::variant<DiracInit, AtomsInit, UniformInit, GaussianInit>;

struct SimConfig {
  double T = 1.0;
  double h = 1e-3;
  std::size_t N = 1000;
  std::uint64_t seed = 1;
  double k = 2.0;
  Domain domain = Domain::interval(0.0, 1.0);
  CoefficientSpec coefficients;
  InitialLaw initial = UniformInit{};
  std::size_t snapshot_stride = 1;
  ReflectionScheme scheme = ReflectionScheme::kAuto;
  int threads = 1;

  void validate() const;
  TimeGrid grid() const { return TimeGrid::make(T, h); }
};

// Draws the initial ensemble; deterministic in (seed, particle id).
ParticleEnsemble sample_initial(const SimConfig& cfg);

struct ParticleStats {
  std::vector<double> sup_abs;
  std::vector<double> local_time;
  std::vector<double> tilde_local_time;
};

struct SimulationResult {
  MeasureFlow flow;
  ParticleStats stats;
  ParticleEnsemble final_state;
};

using StepObserver = std::function<void(const ParticleEnsemble&)>;

// Advances every particle by dt through reflect_step, drift evaluated from
// `drift` (built on the pre-step law). Noise of particle i at step n comes
// from the stream (seed, ids[i], n).
void advance(ParticleEnsemble& ens, const CoefficientSpec& coeffs, const Domain& domain, double dt,
             const DriftField& drift, std::uint64_t seed, ReflectionScheme scheme,
             ThreadPool* pool = nullptr);

// One explicit Euler-Maruyama step with end-of-step reflection, drift taken
// from the ensemble's own empirical law.
ParticleEnsemble step_particles(const ParticleEnsemble& ens, const CoefficientSpec& coeffs,
                                const Domain& domain, double h, std::uint64_t seed,
                                ReflectionScheme scheme = ReflectionScheme::kAuto);

// Interacting N-particle system.
SimulationResult simulate_mckean(const SimConfig& cfg, const StepObserver& observer = {});

// Non-interacting particles started from gamma, drift frozen to `flow`.
SimulationResult apply_H(const MeasureFlow& flow, const SimConfig& cfg, const EmpiricalMeasure& gamma,
                         const StepObserver& observer = {});

// sup_t e^{-lambda t} W_k(a_t, b_t) over the common grid.
double flow_distance(const MeasureFlow& a, const MeasureFlow& b, double k, double lambda = 0.0);

struct PicardOptions {
  std::size_t max_iter = 20;
  double tol = 1e-2;
  double lambda = 0.0;
};

struct PicardResult {
  MeasureFlow fixed_point;
  std::vector<double> distances;           // sup_t W_k(mu^{m+1}_t, mu^m_t)
  std::vector<double> weighted_distances;  // sup_t e^{-lambda t} W_k(...)
  bool converged = false;
  std::size_t iterations = 0;
};

// mu^0 is the constant flow gamma; mu^{m+1} = H(mu^m) with common random numbers.
PicardResult picard_solve(const SimConfig& cfg, const EmpiricalMeasure& gamma,
                          const PicardOptions& options = {});

struct CouplingOptions {
  double t0 = 1.0;
  double L = 1.0;
  std::size_t pairs = 1;
  // Frozen laws for measure-dependent drifts (X uses mu, Y uses nu).
  const MeasureFlow* mu_flow = nullptr;
  const MeasureFlow* nu_flow = nullptr;
};

struct CouplingRecord {
  std::vector<double> times;
  std::vector<double> mean_gap;       // mean over pairs of |X_t - Y_t|
  std::vector<double> terminal_gaps;  // per pair
  std::vector<double> costs;          // per pair, NaN when sigma sigma^T is singular
  double mean_terminal_gap = 0.0;
  double mean_cost = 0.0;
  bool clamped = false;
  std::size_t clamped_steps = 0;
  double xi_min = 0.0;
};

// xi_t = (1 - e^{L (t - t0)}) / L floored at the step size.
double coupling_xi(double t, double t0, double L);

// Pairs (X, Y) with shared noise, X carrying the extra drift -(X - Y) / xi_t.
CouplingRecord couple_pair(const SimConfig& cfg, const Vec& x0, const Vec& y0,
                           const CouplingOptions& options);

}  // namespace rsde::sde
