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

#include <atomic>
#include <stdexcept>

#include "rsde/parallel.hpp"

namespace rsde {
namespace {

TEST(ThreadPool, CoversEveryIndexOnce) {
  for (int threads : {1, 2, 4}) {
    ThreadPool pool(threads);
    const std::size_t n = 3 * kChunkSize + 17;
    std::vector<int> hits(n, 0);
    pool.for_chunks(n, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(ThreadPool, ChunkTopologyFixed) {
  ThreadPool pool(3);
  std::vector<std::pair<std::size_t, std::size_t>> bounds(chunk_count(5000));
  pool.for_chunks(5000, [&](std::size_t c, std::size_t b, std::size_t e) { bounds[c] = {b, e}; });
  for (std::size_t c = 0; c < bounds.size(); ++c) {
    EXPECT_EQ(bounds[c].first, c * kChunkSize);
    EXPECT_EQ(bounds[c].second, std::min<std::size_t>(5000, (c + 1) * kChunkSize));
  }
}

TEST(ThreadPool, PropagatesExceptions) {
  ThreadPool pool(2);
  EXPECT_THROW(pool.for_chunks(10 * kChunkSize,
                               [](std::size_t c, std::size_t, std::size_t) {
                                 if (c == 3) throw std::runtime_error("boom");
                               }),
               std::runtime_error);
  std::atomic<int> count{0};
  pool.for_chunks(kChunkSize * 2, [&](std::size_t, std::size_t, std::size_t) { ++count; });
  EXPECT_EQ(count.load(), 2);
}

TEST(DeterministicSum, MatchesChunkedOrder) {
  std::vector<double> v(10000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i));
  double expected = 0.0;
  for (std::size_t c = 0; c < chunk_count(v.size()); ++c) {
    double part = 0.0;
    for (std::size_t i = c * kChunkSize; i < std::min(v.size(), (c + 1) * kChunkSize); ++i) part += v[i];
    expected += part;
  }
  EXPECT_EQ(deterministic_sum(v), expected);
}

}  // namespace
}  // namespace rsde
