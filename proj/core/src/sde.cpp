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

#include "rsde/sde.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rsde/error.hpp"

namespace rsde::sde {

EmpiricalMeasure ParticleEnsemble::measure() const { return EmpiricalMeasure(dim, positions); }

ParticleEnsemble ParticleEnsemble::from_points(int dim, std::vector<double> coords) {
  ParticleEnsemble ens;
  ens.dim = dim;
  const std::size_t n = coords.size() / static_cast<std::size_t>(dim);
  ens.positions = std::move(coords);
  ens.local_time.assign(n, 0.0);
  ens.tilde_local_time.assign(n, 0.0);
  ens.ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) ens.ids[i] = i;
  return ens;
}

void MeasureFlow::validate() const {
  if (times.empty() || times.size() != snapshots.size())
    throw InvalidArgument("MeasureFlow: times and snapshots must be non-empty and equal length");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidArgument("MeasureFlow: times not increasing");
    if (snapshots[i].size() != snapshots[0].size())
      throw InvalidArgument("MeasureFlow: snapshot atom counts differ");
  }
}

const EmpiricalMeasure& MeasureFlow::at_step(std::uint64_t step) const {
  if (steps.size() != snapshots.size() || steps.empty())
    throw InvalidArgument("MeasureFlow: no step index");
  auto it = std::upper_bound(steps.begin(), steps.end(), step);
  const std::size_t k = it == steps.begin() ? 0 : static_cast<std::size_t>(it - steps.begin()) - 1;
  return snapshots[k];
}

const EmpiricalMeasure& MeasureFlow::at_time(double t) const {
  if (times.empty()) throw InvalidArgument("MeasureFlow: empty");
  auto it = std::upper_bound(times.begin(), times.end(), t + 1e-12);
  const std::size_t k = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  return snapshots[k];
}

TimeGrid TimeGrid::make(double T, double h) {
  if (!(T > 0.0) || !(h > 0.0) || h > T * (1.0 + 1e-12))
    throw InvalidArgument("time grid needs T > 0 and 0 < h <= T");
  TimeGrid g;
  g.T = T;
  g.h = h;
  g.steps = static_cast<std::uint64_t>(std::ceil(T / h - 1e-9));
  if (g.steps == 0) g.steps = 1;
  return g;
}

void SimConfig::validate() const {
  if (!(T > 0.0)) throw ConfigError("sim.T", "must be > 0");
  if (!(h > 0.0)) throw ConfigError("sim.h", "must be > 0");
  if (h > T) throw ConfigError("sim.h", "must be <= T");
  if (N < 1) throw ConfigError("sim.N", "must be >= 1");
  if (!(k >= 0.0)) throw ConfigError("sim.k", "must be >= 0");
  if (snapshot_stride < 1) throw ConfigError("sim.snapshot_stride", "must be >= 1");
  coefficients.validate(domain, false, seed);
}

ParticleEnsemble sample_initial(const SimConfig& cfg) {
  const int d = cfg.domain.dim();
  std::vector<double> coords(cfg.N * static_cast<std::size_t>(d));
  auto put = [&](std::size_t i, const Vec& x) {
    if (x.dim() != d) throw InvalidArgument("initial law: dimension mismatch");
    if (!geometry::contains(cfg.domain, x))
      throw InvalidArgument("initial law: point outside the domain");
    for (int c = 0; c < d; ++c) coords[i * static_cast<std::size_t>(d) + c] = x[c];
  };
  for (std::size_t i = 0; i < cfg.N; ++i) {
    CounterRng rng(cfg.seed, StreamTag::kInitial, i, 0);
    std::visit(
        [&](const auto& law) {
          using L = std::decay_t<decltype(law)>;
          if constexpr (std::is_same_v<L, DiracInit>) {
            put(i, law.point);
          } else if constexpr (std::is_same_v<L, AtomsInit>) {
            if (law.atoms.size() == 0) throw InvalidArgument("initial law: no atoms");
            put(i, law.atoms.atom(i % law.atoms.size()));
          } else if constexpr (std::is_same_v<L, UniformInit>) {
            put(i, geometry::sample_closure(cfg.domain, rng));
          } else {
            constexpr int kMaxTries = 100000;
            for (int attempt = 0;; ++attempt) {
              if (attempt == kMaxTries)
                throw InvalidArgument("initial law: gaussian has negligible mass in the domain");
              Vec z(d);
              for (int c = 0; c < d; ++c) z[c] = law.mean[c] + law.sd * rng.normal();
              if (geometry::contains(cfg.domain, z)) {
                put(i, z);
                break;
              }
            }
          }
        },
        cfg.initial);
  }
  return ParticleEnsemble::from_points(d, std::move(coords));
}

void advance(ParticleEnsemble& ens, const CoefficientSpec& coeffs, const Domain& domain, double dt,
             const DriftField& drift, std::uint64_t seed, ReflectionScheme scheme, ThreadPool* pool) {
  if (!(dt > 0.0)) throw InvalidArgument("step: h must be > 0");
  if (ens.dim != domain.dim()) throw InvalidArgument("step: dimension mismatch");
  const int d = ens.dim;
  const int m = coeffs.noise_dim(d);
  const bool state_dependent = std::holds_alternative<StateDependentDiffusion>(coeffs.diffusion);
  const Mat sigma0 = state_dependent ? Mat() : coeffs.sigma(Vec(d), ens.time);
  const bool zero_noise = !state_dependent && sigma0.is_zero();
  const auto* scalar = std::get_if<ScalarDiffusion>(&coeffs.diffusion);
  const double sq = std::sqrt(dt);
  const std::uint64_t step = ens.step;
  const double t = ens.time;

  auto body = [&](std::size_t, std::size_t begin, std::size_t end) {
    Vec xi(m);
    for (std::size_t i = begin; i < end; ++i) {
      const Vec x = ens.position(i);
      Vec disp = drift(x) * dt;
      if (!zero_noise) {
        CounterRng rng(seed, StreamTag::kIncrement, ens.ids[i], step);
        for (int j = 0; j < m; ++j) xi[j] = rng.normal();
        if (scalar != nullptr) {
          disp += (scalar->s * sq) * xi;
        } else {
          disp += ((state_dependent ? coeffs.sigma(x, t) : sigma0) * xi) * sq;
        }
      }
      const auto out = geometry::reflect_step(domain, x, disp, scheme);
      if (!geometry::contains(domain, out.position))
        throw NumericalError("step: particle left the closed domain");
      ens.set_position(i, out.position);
      ens.local_time[i] += out.local_time_increment;
      ens.tilde_local_time[i] += out.tilde_local_time_increment;
    }
  };
  // Scalar path for folding in an interval.
  const auto* iv = std::get_if<geometry::Interval>(&domain.shape());
  const bool scalar_path = iv != nullptr && scheme == ReflectionScheme::kAuto && !state_dependent;
  const bool tilde_lower = iv && std::isfinite(iv->lower) && domain.tilde_boundary()(Vec{iv->lower});
  const bool tilde_upper = iv && std::isfinite(iv->upper) && domain.tilde_boundary()(Vec{iv->upper});
  auto body_1d = [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double x = ens.positions[i];
      double y = x + drift(Vec{x})[0] * dt;
      if (!zero_noise) {
        CounterRng rng(seed, StreamTag::kIncrement, ens.ids[i], step);
        double noise = 0.0;
        for (int j = 0; j < m; ++j) noise += sigma0(0, j) * rng.normal();
        y += noise * sq;
      }
      if (!std::isfinite(y)) throw NumericalError("step: non-finite position");
      if (y < iv->lower || y > iv->upper) {
        const auto f = geometry::fold_into_interval(*iv, y, tilde_lower, tilde_upper);
        y = f.position;
        ens.local_time[i] += f.local_time_increment;
        ens.tilde_local_time[i] += f.tilde_local_time_increment;
        if (y < iv->lower || y > iv->upper)
          throw NumericalError("step: particle left the closed domain");
      }
      ens.positions[i] = y;
    }
  };
  const std::function<void(std::size_t, std::size_t, std::size_t)> job =
      scalar_path ? std::function<void(std::size_t, std::size_t, std::size_t)>(body_1d)
                  : std::function<void(std::size_t, std::size_t, std::size_t)>(body);
  if (pool != nullptr) {
    pool->for_chunks(ens.size(), job);
  } else {
    for (std::size_t c = 0; c < chunk_count(ens.size()); ++c)
      job(c, c * kChunkSize, std::min(ens.size(), (c + 1) * kChunkSize));
  }
  ens.time += dt;
  ens.step += 1;
}

ParticleEnsemble step_particles(const ParticleEnsemble& ens, const CoefficientSpec& coeffs,
                                const Domain& domain, double h, std::uint64_t seed,
                                ReflectionScheme scheme) {
  ParticleEnsemble next = ens;
  std::optional<EmpiricalMeasure> snapshot;
  if (coeffs.depends_on_measure()) snapshot = ens.measure();
  const DriftField drift(coeffs, snapshot ? &*snapshot : nullptr, ens.time);
  advance(next, coeffs, domain, h, drift, seed, scheme);
  return next;
}

namespace {

std::vector<std::uint64_t> snapshot_steps(const TimeGrid& grid, std::size_t stride) {
  std::vector<std::uint64_t> steps;
  for (std::uint64_t n = 0; n < grid.steps; n += stride) steps.push_back(n);
  steps.push_back(grid.steps);
  return steps;
}

double max_abs_norm(const ParticleEnsemble& ens, std::size_t i) { return norm(ens.position(i)); }

SimulationResult run(const SimConfig& cfg, ParticleEnsemble ens, const MeasureFlow* frozen,
                     const StepObserver& observer) {
  const TimeGrid grid = cfg.grid();
  const auto& coeffs = cfg.coefficients;
  std::unique_ptr<ThreadPool> pool;
  if (cfg.threads > 1) pool = std::make_unique<ThreadPool>(cfg.threads);

  SimulationResult result;
  auto record = [&] {
    result.flow.times.push_back(ens.time);
    result.flow.steps.push_back(ens.step);
    result.flow.snapshots.push_back(ens.measure());
  };
  const std::size_t n = ens.size();
  result.stats.sup_abs.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.stats.sup_abs[i] = max_abs_norm(ens, i);

  ens.time = 0.0;
  ens.step = 0;
  record();
  const bool needs_measure = coeffs.depends_on_measure();
  for (std::uint64_t s = 0; s < grid.steps; ++s) {
    const double t = grid.time(s);
    ens.time = t;
    std::optional<EmpiricalMeasure> snapshot;
    const EmpiricalMeasure* law = nullptr;
    if (needs_measure) {
      if (frozen != nullptr) {
        law = &frozen->at_step(s);
      } else {
        snapshot = ens.measure();
        law = &*snapshot;
      }
    }
    const DriftField drift(coeffs, law, t);
    advance(ens, coeffs, cfg.domain, grid.dt(s), drift, cfg.seed, cfg.scheme, pool.get());
    ens.time = grid.time(s + 1);
    for (std::size_t i = 0; i < n; ++i)
      result.stats.sup_abs[i] = std::max(result.stats.sup_abs[i], max_abs_norm(ens, i));
    if ((s + 1) % cfg.snapshot_stride == 0 || s + 1 == grid.steps) record();
    if (observer) observer(ens);
  }
  result.stats.local_time = ens.local_time;
  result.stats.tilde_local_time = ens.tilde_local_time;
  result.final_state = std::move(ens);
  return result;
}

}  // namespace

SimulationResult simulate_mckean(const SimConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  return run(cfg, sample_initial(cfg), nullptr, observer);
}

SimulationResult apply_H(const MeasureFlow& flow, const SimConfig& cfg, const EmpiricalMeasure& gamma,
                         const StepObserver& observer) {
  cfg.validate();
  flow.validate();
  const auto expected = snapshot_steps(cfg.grid(), cfg.snapshot_stride);
  if (flow.steps != expected) throw InvalidArgument("apply_H: flow grid does not match the config grid");
  const TimeGrid grid = cfg.grid();
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (std::abs(flow.times[i] - grid.time(expected[i])) > 1e-12)
      throw InvalidArgument("apply_H: flow times do not match the config grid");
  if (gamma.dim() != cfg.domain.dim()) throw InvalidArgument("apply_H: gamma dimension mismatch");
  if (!gamma.uniform()) throw InvalidArgument("apply_H: gamma must have equal weights");
  if (flow.snapshots.front().coords() != gamma.coords())
    throw InvalidArgument("apply_H: initial snapshot differs from gamma");
  return run(cfg, ParticleEnsemble::from_points(gamma.dim(), gamma.coords()), &flow, observer);
}

double flow_distance(const MeasureFlow& a, const MeasureFlow& b, double k, double lambda) {
  if (a.times.size() != b.times.size()) throw InvalidArgument("flow_distance: grids differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-12)
      throw InvalidArgument("flow_distance: grids differ");
    const double w = measures::wasserstein_k(k, a.snapshots[i], b.snapshots[i]);
    worst = std::max(worst, std::exp(-lambda * a.times[i]) * w);
  }
  return worst;
}

PicardResult picard_solve(const SimConfig& cfg, const EmpiricalMeasure& gamma,
                          const PicardOptions& options) {
  if (options.max_iter < 1) throw InvalidArgument("picard_solve: max_iter must be >= 1");
  const TimeGrid grid = cfg.grid();
  MeasureFlow current;
  current.steps = snapshot_steps(grid, cfg.snapshot_stride);
  for (auto s : current.steps) {
    current.times.push_back(grid.time(s));
    current.snapshots.push_back(gamma);
  }

  PicardResult result;
  for (std::size_t m = 0; m < options.max_iter; ++m) {
    MeasureFlow next = apply_H(current, cfg, gamma).flow;
    result.distances.push_back(flow_distance(next, current, cfg.k, 0.0));
    result.weighted_distances.push_back(flow_distance(next, current, cfg.k, options.lambda));
    current = std::move(next);
    if (result.distances.back() < options.tol) {
      result.converged = true;
      result.iterations = m;
      break;
    }
    result.iterations = m + 1;
  }
  result.fixed_point = std::move(current);
  return result;
}

}  // namespace rsde::sde
