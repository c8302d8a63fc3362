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

#include "rsde/coefficients.hpp"
#include "rsde/error.hpp"
#include "rsde/rng.hpp"

namespace rsde::sde {
namespace {

CoefficientSpec granular(Potential v, InteractionKernel w) {
  CoefficientSpec c;
  c.drift = GranularMedia{v, w};
  return c;
}

EmpiricalMeasure random_measure(int dim, std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, StreamTag::kTest, n, 0);
  std::vector<double> c(n * static_cast<std::size_t>(dim));
  for (auto& v : c) v = 2.0 * rng.normal();
  return {dim, c};
}

TEST(MeanFieldDrift, QuadraticKernelPullsToMean) {
  const auto c = granular(Potential::zero(), InteractionKernel::power(2.0));
  const EmpiricalMeasure mu(1, {0.0, 1.0, 5.0});
  EXPECT_NEAR(mean_field_drift(c, Vec{4.0}, mu, 0.0)[0], -2.0 * (4.0 - 2.0), 1e-14);
}

TEST(MeanFieldDrift, QuadraticPotential) {
  const auto c = granular(Potential::quadratic(), InteractionKernel::zero());
  EXPECT_NEAR(mean_field_drift(c, Vec{3.0}, EmpiricalMeasure::dirac(Vec{0.0}), 0.0)[0], -3.0, 1e-15);
}

TEST(MeanFieldDrift, CubicKernelSymmetricAtoms) {
  const auto c = granular(Potential::zero(), InteractionKernel::power(3.0));
  EXPECT_NEAR(mean_field_drift(c, Vec{0.0}, EmpiricalMeasure(1, {-1.0, 1.0}), 0.0)[0], 0.0, 1e-15);
  // Brute-force: grad W(u) = 3|u|u.
  const EmpiricalMeasure mu(1, {-1.0, 0.5, 2.0});
  double expected = 0.0;
  for (double z : {-1.0, 0.5, 2.0}) expected -= 3.0 * std::abs(0.3 - z) * (0.3 - z) / 3.0;
  EXPECT_NEAR(mean_field_drift(c, Vec{0.3}, mu, 0.0)[0], expected, 1e-14);
}

TEST(MeanFieldDrift, LinearMeanField) {
  CoefficientSpec c;
  c.drift = LinearMeanField{Mat::identity(2, -1.0), Mat::identity(2, 0.5)};
  const EmpiricalMeasure mu(2, {0.0, 0.0, 2.0, 4.0});
  const Vec b = mean_field_drift(c, Vec{1.0, 1.0}, mu, 0.0);
  EXPECT_NEAR(b[0], -1.0 + 0.5 * 1.0, 1e-15);
  EXPECT_NEAR(b[1], -1.0 + 0.5 * 2.0, 1e-15);
}

TEST(DriftField, FastPathsMatchDirectSum) {
  const auto mu1 = random_measure(1, 300, 1);
  const auto mu2 = random_measure(2, 200, 2);
  std::vector<CoefficientSpec> cases;
  for (double p : {1.5, 2.0, 3.0, 4.0, 5.0, 7.0})
    cases.push_back(granular(Potential::double_well(0.5), InteractionKernel::power(p, 0.7)));
  CoefficientSpec lin;
  lin.drift = LinearMeanField{Mat::identity(1, -1.0), Mat::identity(1, 0.3)};
  cases.push_back(lin);
  for (const auto& c : cases) {
    DriftField f(c, &mu1, 0.0);
    for (double x : {-5.0, -1.3, 0.0, 0.2, mu1.coords()[7], 3.3}) {
      const double direct = mean_field_drift(c, Vec{x}, mu1, 0.0)[0];
      EXPECT_NEAR(f(Vec{x})[0], direct, 1e-9 * (1.0 + std::abs(direct)));
    }
  }
  for (double p : {2.0, 3.0}) {
    const auto c = granular(Potential::quadratic(), InteractionKernel::power(p));
    DriftField f(c, &mu2, 0.0);
    const Vec x{0.4, -0.7};
    const Vec direct = mean_field_drift(c, x, mu2, 0.0);
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(f(x)[a], direct[a], 1e-9 * (1.0 + std::abs(direct[a])));
  }
}

TEST(Potential, GradientsMatchFiniteDifferences) {
  for (const auto& v : {Potential::quadratic(2.0), Potential::double_well(1.5)}) {
    const Vec x{0.7, -0.4};
    const Vec g = v.gradient(x);
    for (int a = 0; a < 2; ++a) {
      Vec p = x, m = x;
      p[a] += 1e-6;
      m[a] -= 1e-6;
      EXPECT_NEAR(g[a], (v.value(p) - v.value(m)) / 2e-6, 1e-7);
    }
  }
  const auto w = InteractionKernel::power(3.0, 2.0);
  EXPECT_EQ(w.gradient(Vec{0.0})[0], 0.0);
  EXPECT_NEAR(w.gradient(Vec{-0.5})[0], (w.value(Vec{-0.5 + 1e-6}) - w.value(Vec{-0.5 - 1e-6})) / 2e-6, 1e-7);
}

TEST(CoefficientSpec, Validation) {
  const auto domain = geometry::Domain::interval(-1.0, 1.0);
  CoefficientSpec ok;
  EXPECT_NO_THROW(ok.validate(domain, true));
  CoefficientSpec singular;
  singular.drift = make_custom_drift("inverse_power", {{"scale", {1.0}}, {"alpha", {0.5}}}, 1);
  EXPECT_THROW(singular.validate(domain, false), InvalidArgument);
  CoefficientSpec capped;
  capped.drift = make_custom_drift("inverse_power", {{"scale", {1.0}}, {"alpha", {0.5}}, {"cap", {10.0}}}, 1);
  EXPECT_NO_THROW(capped.validate(domain, false));
  CoefficientSpec degenerate;
  degenerate.diffusion = ScalarDiffusion{0.0};
  EXPECT_THROW(degenerate.validate(domain, true), InvalidArgument);
  EXPECT_NO_THROW(degenerate.validate(domain, false));
  CoefficientSpec wrong_dim;
  wrong_dim.drift = LinearMeanField{Mat::identity(2), Mat::identity(2)};
  EXPECT_THROW(wrong_dim.validate(domain, false), InvalidArgument);
  EXPECT_THROW(make_custom_drift("nonexistent", {}, 1), InvalidArgument);
}

TEST(CoefficientSpec, DiffusionShapes) {
  CoefficientSpec c;
  c.diffusion = ScalarDiffusion{0.5};
  EXPECT_EQ(c.isotropic_diffusivity(2).value(), 0.125);
  c.diffusion = make_state_dependent_diffusion("modulated", {{"s", {1.0}}, {"eps", {0.5}}}, 1);
  EXPECT_FALSE(c.isotropic_diffusivity(1).has_value());
  EXPECT_NEAR(c.sigma(Vec{std::acos(-1.0) / 2}, 0.0)(0, 0), 1.5, 1e-15);
  EXPECT_FALSE(c.depends_on_measure());
  c.drift = GranularMedia{Potential::zero(), InteractionKernel::power(3.0)};
  EXPECT_TRUE(c.depends_on_measure());
}

}  // namespace
}  // namespace rsde::sde
