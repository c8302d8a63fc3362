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

#include <benchmark/benchmark.h>

#include <cmath>

#include "rsde/pde.hpp"

namespace {

using namespace rsde;

void BM_FpStep(benchmark::State& state) {
  sde::CoefficientSpec c;
  c.diffusion = sde::ScalarDiffusion{std::sqrt(2.0)};
  c.drift = sde::GranularMedia{sde::Potential::quadratic(), sde::InteractionKernel::power(3.0)};
  auto g = pde::initial_density(sde::GaussianInit{Vec{0.5}, 0.5},
                                pde::DensityGrid::interval(-2.0, 2.0, static_cast<std::size_t>(state.range(0))));
  const double dt = 0.5 * pde::diffusive_step_limit(g, 1.0);
  for (auto _ : state) {
    g = pde::fp_step(g, c, dt);
    benchmark::DoNotOptimize(g.density.data());
  }
}
BENCHMARK(BM_FpStep)->Range(64, 512);

void BM_FpStepHeat2d(benchmark::State& state) {
  sde::CoefficientSpec c;
  c.diffusion = sde::ScalarDiffusion{std::sqrt(2.0)};
  c.drift = sde::make_custom_drift("ou", {{"theta", {1.0}}, {"center", {0.0, 0.0}}}, 2);
  const auto n = static_cast<std::size_t>(state.range(0));
  auto g = pde::initial_density(sde::GaussianInit{Vec{0.0, 0.0}, 0.4},
                                pde::DensityGrid::box({-1.0, -1.0}, {1.0, 1.0}, {n, n}));
  const double dt = 0.5 * pde::diffusive_step_limit(g, 1.0);
  for (auto _ : state) {
    g = pde::fp_step(g, c, dt);
    benchmark::DoNotOptimize(g.density.data());
  }
}
BENCHMARK(BM_FpStepHeat2d)->Range(32, 128);

}  // namespace
