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
#include <vector>

#include "rsde/assignment.hpp"
#include "rsde/measures.hpp"
#include "rsde/rng.hpp"

namespace {

std::vector<double> points(std::size_t n, std::uint64_t seed) {
  rsde::CounterRng rng(seed, rsde::StreamTag::kTest, 0, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = points(n, 1), b = points(n, 2);
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = (a[i] - b[j]) * (a[i] - b[j]);
  for (auto _ : state) benchmark::DoNotOptimize(rsde::transport::solve_assignment(cost, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assignment)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_W2Sorted(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const rsde::measures::EmpiricalMeasure mu(1, points(n, 3)), nu(1, points(n, 4));
  for (auto _ : state) benchmark::DoNotOptimize(rsde::measures::wasserstein_k(2.0, mu, nu));
}
BENCHMARK(BM_W2Sorted)->Range(1 << 10, 1 << 16);

}  // namespace
