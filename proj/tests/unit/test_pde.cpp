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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rsde/error.hpp"
#include "rsde/pde.hpp"

namespace rsde::pde {
namespace {

using sde::CoefficientSpec;

CoefficientSpec heat(double diffusivity) {
  CoefficientSpec c;
  c.diffusion = sde::ScalarDiffusion{std::sqrt(2.0 * diffusivity)};
  return c;
}

CoefficientSpec granular(sde::Potential v, sde::InteractionKernel w, double diffusivity = 1.0) {
  auto c = heat(diffusivity);
  c.drift = sde::GranularMedia{v, w};
  return c;
}

double l1(const DensityGrid& g, const std::function<double(double)>& rho) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += std::abs(g.density[i] - rho(g.center(0, i))) * g.width(0);
  return s;
}

DensityGrid bump(double lo, double hi, std::size_t cells, double at, double sd) {
  return initial_density(sde::GaussianInit{Vec{at}, sd}, DensityGrid::interval(lo, hi, cells));
}

TEST(FpStep, UniformIsEquilibrium) {
  auto g = DensityGrid::interval(0, 1, 100);
  std::fill(g.density.begin(), g.density.end(), 1.0);
  const auto next = fp_step(g, heat(1.0), 0.5 * diffusive_step_limit(g, 1.0));
  for (double v : next.density) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(FpStep, CflViolationThrows) {
  auto g = DensityGrid::interval(0, 1, 100);
  std::fill(g.density.begin(), g.density.end(), 1.0);
  EXPECT_THROW(fp_step(g, heat(1.0), 1.01 * diffusive_step_limit(g, 1.0)), InvalidArgument);
  EXPECT_NEAR(diffusive_step_limit(g, 1.0), 0.4 * 1e-4, 1e-18);
}

TEST(Solve, BumpRelaxesToUniform) {
  const auto g = bump(0, 1, 100, 0.2, 0.05);
  SolveOptions o;
  o.snapshot_times = {2.0};
  const auto t = solve(g, heat(1.0), o);
  EXPECT_LT(l1(t.snapshots.back(), [](double) { return 1.0; }), 1e-3);
}

TEST(Solve, MatchesHeatKernel) {
  // Cell averages of a narrow initial bump evolve like the kernel from its centre.
  const auto g = bump(0, 1, 400, 0.3, 0.01);
  SolveOptions o;
  o.snapshot_times = {0.05};
  const auto t = solve(g, heat(0.5), o);
  const auto& end = t.snapshots.back();
  const double err = l1(end, [](double x) { return neumann_heat_kernel(x, 0.3, 0.05 + 1e-4, 0.5, 0.0, 1.0); });
  EXPECT_LT(err, 5e-3);
}

TEST(HeatKernel, CosineSeriesMatchesImages) {
  for (double t : {0.01, 0.1, 1.0})
    for (double x : {0.0, 0.3, 0.77, 1.0})
      for (double y : {0.1, 0.5})
        EXPECT_NEAR(neumann_heat_kernel(x, y, t, 0.7, 0.0, 1.0, 2000),
                    testing::images_heat_kernel(x, y, t, 0.7, 0.0, 1.0), 1e-9)
            << t << " " << x << " " << y;
}

TEST(Solve, GibbsSteadyState) {
  const auto g = bump(-6, 6, 240, 1.0, 0.5);
  const auto c = granular(sde::Potential::quadratic(), sde::InteractionKernel::zero());
  SolveOptions o;
  o.snapshot_times = {12.0};
  const auto t = solve(g, c, o);
  const double z = std::sqrt(2.0 * std::numbers::pi) * std::erf(6.0 / std::numbers::sqrt2);
  const double err = l1(t.snapshots.back(), [&](double x) { return std::exp(-x * x / 2.0) / z; });
  EXPECT_LT(err, 2.0 * g.width(0));
}

TEST(Solve, MassConservedOverManySteps) {
  const auto g = bump(-1.5, 1.5, 40, 0.3, 0.4);
  const auto c = granular(sde::Potential::double_well(), sde::InteractionKernel::power(3.0));
  SolveOptions o;
  const double dt = 0.9 * diffusive_step_limit(g, 1.0);
  o.snapshot_times = {dt * 1e5};
  o.max_dt = dt;
  const auto t = solve(g, c, o);
  EXPECT_GE(t.steps, 100000u);
  EXPECT_LT(t.max_step_mass_defect, 1e-10);
  EXPECT_LT(t.max_mass_defect, 1e-8);
  for (double v : t.snapshots.back().density) EXPECT_GE(v, 0.0);
}

TEST(Solve, EvenDataStaysEven) {
  const auto g = bump(-2, 2, 200, 0.0, 0.5);
  const auto c = granular(sde::Potential::quadratic(), sde::InteractionKernel::power(3.0));
  SolveOptions o;
  o.snapshot_times = {0.5};
  const auto traj = solve(g, c, o);
  const auto& end = traj.snapshots.back();
  for (std::size_t i = 0; i < end.size() / 2; ++i)
    EXPECT_NEAR(end.density[i], end.density[end.size() - 1 - i], 1e-12);
}

TEST(WeakForm, ConstantTestFunction) {
  const auto g = bump(-2, 2, 100, 0.5, 0.5);
  const auto c = granular(sde::Potential::quadratic(), sde::InteractionKernel::power(3.0));
  SolveOptions o;
  o.snapshot_times = {0.5};
  o.record_all = true;
  const auto t = solve(g, c, o);
  const auto r = weak_form_residual(t, c, {TestFunction::constant()});
  EXPECT_LT(r[0].residual, 1e-10);
}

TEST(WeakForm, CosineModePureDiffusion) {
  const auto g = bump(0, 1, 200, 0.3, 0.1);
  SolveOptions o;
  o.snapshot_times = {0.1};
  o.record_all = true;
  const auto t = solve(g, heat(1.0), o);
  const auto r = weak_form_residual(t, heat(1.0), {TestFunction::cosine(1, 0.0, 1.0)});
  EXPECT_LT(r[0].residual, 1e-4);
  // Analytic mode decay: mu_t(cos pi x) = e^{-pi^2 t} mu_0(cos pi x).
  double m0 = 0, m1 = 0;
  const auto& a = t.snapshots.front();
  const auto& b = t.snapshots.back();
  for (std::size_t i = 0; i < a.size(); ++i) {
    m0 += a.density[i] * std::cos(std::numbers::pi * a.center(0, i)) * a.width(0);
    m1 += b.density[i] * std::cos(std::numbers::pi * b.center(0, i)) * b.width(0);
  }
  EXPECT_NEAR(m1, std::exp(-std::numbers::pi * std::numbers::pi * 0.1) * m0, 1e-4);
}

TEST(WeakForm, NeumannMixConvergesWithGrid) {
  const auto c = granular(sde::Potential::quadratic(), sde::InteractionKernel::zero());
  const auto f = TestFunction::sum({{0.7, TestFunction::cosine(2, -1.0, 1.0)},
                                    {-0.4, TestFunction::neumann_cubic(-1.0, 1.0)},
                                    {0.2, TestFunction::cosine(3, -1.0, 1.0)}});
  std::vector<double> res;
  for (std::size_t cells : {50u, 100u, 200u}) {
    SolveOptions o;
    o.snapshot_times = {0.2};
    o.record_all = true;
    const auto t = solve(bump(-1, 1, cells, 0.2, 0.3), c, o);
    res.push_back(weak_form_residual(t, c, {f})[0].residual);
  }
  EXPECT_LT(res[2], res[0]);
  EXPECT_LT(res[2], 1e-3);
}

TEST(WeakForm, RejectsNonNeumannFunction) {
  SolveOptions o;
  o.snapshot_times = {0.01};
  const auto t = solve(bump(0, 1, 50, 0.5, 0.1), heat(1.0), o);
  TestFunction lin{"x", [](const Vec& x) { return x[0]; }, [](const Vec&) { return Vec{1.0}; },
                   [](const Vec&) { return 0.0; }};
  EXPECT_THROW(weak_form_residual(t, heat(1.0), {lin}), InvalidArgument);
}

TEST(Box2D, UniformEquilibriumAndMass) {
  auto g = DensityGrid::box({0, 0}, {1, 2}, {20, 40});
  std::fill(g.density.begin(), g.density.end(), 0.5);
  EXPECT_NEAR(g.mass(), 1.0, 1e-12);
  const auto next = fp_step(g, heat(1.0), 0.5 * diffusive_step_limit(g, 1.0));
  for (double v : next.density) EXPECT_NEAR(v, 0.5, 1e-15);
  const auto c = granular(sde::Potential::quadratic(), sde::InteractionKernel::power(2.0));
  auto b = initial_density(sde::GaussianInit{Vec{0.4, 1.2}, 0.2}, DensityGrid::box({0, 0}, {1, 2}, {20, 40}));
  SolveOptions o;
  o.snapshot_times = {0.05};
  const auto t = solve(b, c, o);
  EXPECT_LT(t.max_mass_defect, 1e-12);
}

TEST(ComparePdeParticles, UniformNoiseFloorAndRefinement) {
  auto grid = DensityGrid::interval(0, 1, 50);
  std::fill(grid.density.begin(), grid.density.end(), 1.0);
  SolveOptions o;
  o.snapshot_times = {0.1};
  const auto traj = solve(grid, heat(0.5), o);
  std::vector<double> dist;
  for (std::size_t n : {4000u, 16000u}) {
    sde::SimConfig c;
    c.T = 0.1;
    c.h = 1e-2;
    c.N = n;
    c.initial = sde::UniformInit{};
    c.snapshot_stride = 10;
    const auto flow = sde::simulate_mckean(c).flow;
    const auto rows = compare_particle_pde(flow, traj);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_LT(rows.back().l1, 3.0 * std::sqrt(50.0 / n));
    dist.push_back(rows.back().l1);
  }
  EXPECT_LT(dist[1], dist[0]);
}

TEST(ComparePdeParticles, TimeMismatchThrows) {
  auto grid = DensityGrid::interval(0, 1, 10);
  std::fill(grid.density.begin(), grid.density.end(), 1.0);
  SolveOptions o;
  o.snapshot_times = {0.05};
  const auto traj = solve(grid, heat(0.5), o);
  sde::SimConfig c;
  c.T = 0.1;
  c.h = 1e-2;
  c.N = 10;
  c.snapshot_stride = 10;
  EXPECT_THROW(compare_particle_pde(sde::simulate_mckean(c).flow, traj), InvalidArgument);
}

TEST(InitialDensity, NormalisedCellMasses) {
  const auto g = bump(-2, 2, 100, 0.5, 0.5);
  EXPECT_NEAR(g.mass(), 1.0, 1e-14);
  const auto u = initial_density(sde::UniformInit{}, DensityGrid::interval(0, 2, 10));
  for (double v : u.density) EXPECT_NEAR(v, 0.5, 1e-15);
}

}  // namespace
}  // namespace rsde::pde
