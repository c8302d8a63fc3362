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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "rsde/error.hpp"
#include "rsde/sde.hpp"

namespace rsde::sde {

double coupling_xi(double t, double t0, double L) { return -std::expm1(L * (t - t0)) / L; }

CouplingRecord couple_pair(const SimConfig& cfg, const Vec& x0, const Vec& y0,
                           const CouplingOptions& options) {
  const int d = cfg.domain.dim();
  if (x0.dim() != d || y0.dim() != d) throw InvalidArgument("couple_pair: dimension mismatch");
  if (!(options.t0 > 0.0)) throw InvalidArgument("couple_pair: t0 must be > 0");
  if (!(options.L > 0.0)) throw InvalidArgument("couple_pair: L must be > 0");
  if (options.pairs < 1) throw InvalidArgument("couple_pair: pairs must be >= 1");
  if (!geometry::contains(cfg.domain, x0) || !geometry::contains(cfg.domain, y0))
    throw InvalidArgument("couple_pair: start points must lie in the domain");
  const auto& coeffs = cfg.coefficients;
  const bool needs_measure = coeffs.depends_on_measure();
  if (needs_measure && (options.mu_flow == nullptr || options.nu_flow == nullptr))
    throw InvalidArgument("couple_pair: measure-dependent drift needs frozen flows");

  const TimeGrid grid = TimeGrid::make(options.t0, std::min(cfg.h, options.t0));
  const int m = coeffs.noise_dim(d);
  const std::size_t pairs = options.pairs;
  std::vector<Vec> xs(pairs, x0), ys(pairs, y0);
  std::vector<double> costs(pairs, 0.0);

  CouplingRecord rec;
  rec.xi_min = std::numeric_limits<double>::infinity();
  auto record_gap = [&](double t) {
    double s = 0.0;
    for (std::size_t p = 0; p < pairs; ++p) s += norm(xs[p] - ys[p]);
    rec.times.push_back(t);
    rec.mean_gap.push_back(s / static_cast<double>(pairs));
  };
  record_gap(0.0);

  for (std::uint64_t n = 0; n < grid.steps; ++n) {
    const double t = grid.time(n);
    const double dt = grid.dt(n);
    double xi = coupling_xi(t, options.t0, options.L);
    if (xi < grid.h) {
      xi = grid.h;
      rec.clamped = true;
      ++rec.clamped_steps;
    }
    rec.xi_min = std::min(rec.xi_min, xi);
    const DriftField bx(coeffs, needs_measure ? &options.mu_flow->at_time(t) : nullptr, t);
    const DriftField by(coeffs, needs_measure ? &options.nu_flow->at_time(t) : nullptr, t);
    const double sq = std::sqrt(dt);
    for (std::size_t p = 0; p < pairs; ++p) {
      const Vec& x = xs[p];
      const Vec& y = ys[p];
      const Vec gap = x - y;
      const Mat sx = coeffs.sigma(x, t);
      const Mat sy = coeffs.sigma(y, t);
      if (!std::isnan(costs[p]) && norm2(gap) > 0.0) {
        Mat chol;
        if (cholesky(gram(sx), chol)) {
          const Vec w = sx.transposed() * solve_spd(gram(sx), gap);
          costs[p] += 0.5 * norm2(w) / (xi * xi) * dt;
        } else {
          costs[p] = std::numeric_limits<double>::quiet_NaN();
        }
      }
      Vec noise(m);
      if (!sx.is_zero() || !sy.is_zero()) {
        CounterRng rng(cfg.seed, StreamTag::kCoupling, p, n);
        for (int j = 0; j < m; ++j) noise[j] = rng.normal() * sq;
      }
      const Vec dx = (bx(x) - gap / xi) * dt + sx * noise;
      const Vec dy = by(y) * dt + sy * noise;
      xs[p] = geometry::reflect_step(cfg.domain, x, dx, cfg.scheme).position;
      ys[p] = geometry::reflect_step(cfg.domain, y, dy, cfg.scheme).position;
    }
    record_gap(grid.time(n + 1));
  }

  rec.terminal_gaps.resize(pairs);
  for (std::size_t p = 0; p < pairs; ++p) rec.terminal_gaps[p] = norm(xs[p] - ys[p]);
  rec.costs = costs;
  double gap_sum = 0.0, cost_sum = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    gap_sum += rec.terminal_gaps[p];
    cost_sum += costs[p];
  }
  rec.mean_terminal_gap = gap_sum / static_cast<double>(pairs);
  rec.mean_cost = cost_sum / static_cast<double>(pairs);
  return rec;
}

}  // namespace rsde::sde
