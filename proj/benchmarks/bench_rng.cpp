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

#include "rsde/rng.hpp"

namespace {

void BM_PhiloxBlock(benchmark::State& state) {
  rsde::Philox4x32::Counter c{0, 0, 0, 0};
  const rsde::Philox4x32::Key k{0xA4093822u, 0x299F31D0u};
  for (auto _ : state) {
    c[0]++;
    benchmark::DoNotOptimize(rsde::Philox4x32::generate(c, k));
  }
}
BENCHMARK(BM_PhiloxBlock);

void BM_CounterRngNormal(benchmark::State& state) {
  rsde::CounterRng rng(1, rsde::StreamTag::kIncrement, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_CounterRngNormal);

void BM_StreamSetup(benchmark::State& state) {
  std::uint64_t particle = 0;
  for (auto _ : state) {
    rsde::CounterRng rng(7, rsde::StreamTag::kIncrement, particle++, 3);
    benchmark::DoNotOptimize(rng.uniform());
  }
}
BENCHMARK(BM_StreamSetup);

}  // namespace
