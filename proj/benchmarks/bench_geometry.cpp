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

#include "rsde/geometry.hpp"
#include "rsde/rng.hpp"

namespace {

using rsde::geometry::Domain;
using rsde::Vec;

void run(benchmark::State& state, const Domain& domain, Vec x, double scale) {
  rsde::CounterRng rng(3, rsde::StreamTag::kTest, 0, 0);
  for (auto _ : state) {
    Vec d(x.dim());
    for (int a = 0; a < x.dim(); ++a) d[a] = scale * rng.normal();
    x = rsde::geometry::reflect_step(domain, x, d).position;
    benchmark::DoNotOptimize(x);
  }
}

void BM_ReflectInterval(benchmark::State& state) { run(state, Domain::interval(0.0, 1.0), Vec{0.5}, 0.3); }
BENCHMARK(BM_ReflectInterval);

void BM_ReflectBall(benchmark::State& state) {
  run(state, Domain::ball(Vec{0.0, 0.0}, 1.0), Vec{0.0, 0.0}, 0.3);
}
BENCHMARK(BM_ReflectBall);

void BM_ReflectAnnulus(benchmark::State& state) {
  run(state, Domain::annulus(Vec{0.0, 0.0}, 0.5, 1.0), Vec{0.75, 0.0}, 0.1);
}
BENCHMARK(BM_ReflectAnnulus);

}  // namespace
