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

#include "rsde/sde.hpp"

namespace {

using namespace rsde;

sde::SimConfig config(std::size_t n, sde::Drift drift) {
  sde::SimConfig c;
  c.N = n;
  c.h = 1e-3;
  c.domain = geometry::Domain::interval(-2.0, 2.0);
  c.coefficients.drift = std::move(drift);
  c.initial = sde::GaussianInit{Vec{0.0}, 0.5};
  return c;
}

void run(benchmark::State& state, const sde::SimConfig& c) {
  auto ens = sde::sample_initial(c);
  for (auto _ : state) {
    ens = sde::step_particles(ens, c.coefficients, c.domain, c.h, c.seed);
    benchmark::DoNotOptimize(ens.positions.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.N));
}

void BM_StepOu(benchmark::State& state) {
  run(state, config(static_cast<std::size_t>(state.range(0)),
                    sde::make_custom_drift("ou", {{"theta", {1.0}}, {"center", {0.0}}}, 1)));
}
BENCHMARK(BM_StepOu)->Range(1 << 10, 1 << 16);

void BM_StepGranular(benchmark::State& state) {
  run(state, config(static_cast<std::size_t>(state.range(0)),
                    sde::GranularMedia{sde::Potential::quadratic(), sde::InteractionKernel::power(3.0)}));
}
BENCHMARK(BM_StepGranular)->Range(1 << 8, 1 << 12);

}  // namespace
