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
#include <set>

#include "oracles.hpp"
#include "rsde/rng.hpp"

namespace rsde {
namespace {

using testing::ks_distance;
using testing::normal_cdf;

// Known-answer vectors published with Random123 (kat_vectors, philox4x32_10).
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                        {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, SameKeySameSequence) {
  CounterRng a(42, StreamTag::kIncrement, 7, 3);
  CounterRng b(42, StreamTag::kIncrement, 7, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(CounterRng, DistinctKeysDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t seed : {1u, 2u})
    for (auto tag : {StreamTag::kIncrement, StreamTag::kInitial})
      for (std::uint64_t p : {0u, 1u})
        for (std::uint64_t s : {0u, 1u}) first.insert(CounterRng(seed, tag, p, s).next_u64());
  EXPECT_EQ(first.size(), 16u);
}

TEST(CounterRng, UniformRanges) {
  CounterRng r(5, StreamTag::kTest, 0, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double v = r.uniform_pos();
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(CounterRng, UniformKs) {
  CounterRng r(11, StreamTag::kTest, 0, 0);
  std::vector<double> xs(50000);
  for (auto& x : xs) x = r.uniform();
  EXPECT_LT(ks_distance(xs, [](double x) { return x; }), 1.36 / std::sqrt(50000.0));
}

TEST(CounterRng, NormalKsAndMoments) {
  CounterRng r(12, StreamTag::kTest, 0, 0);
  std::vector<double> xs(50000);
  double m = 0, m2 = 0;
  for (auto& x : xs) {
    x = r.normal();
    m += x;
    m2 += x * x;
  }
  m /= xs.size();
  m2 /= xs.size();
  EXPECT_LT(ks_distance(xs, normal_cdf), 1.36 / std::sqrt(50000.0));
  EXPECT_NEAR(m, 0.0, 0.02);
  EXPECT_NEAR(m2, 1.0, 0.03);
}

TEST(CounterRng, BelowIsInRangeAndFair) {
  CounterRng r(3, StreamTag::kTest, 0, 0);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(InverseNormalCdf, InvertsPhi) {
  for (double p : {1e-300, 1e-20, 1e-8, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.97575, 0.999, 1 - 1e-12}) {
    const double x = inverse_normal_cdf(p);
    const double back = normal_cdf(x);
    EXPECT_NEAR(back / p, 1.0, 1e-12) << p;
  }
}

TEST(InverseNormalCdf, Symmetric) {
  for (double p : {0.01, 0.2, 0.45}) EXPECT_NEAR(inverse_normal_cdf(p), -inverse_normal_cdf(1 - p), 1e-14);
  EXPECT_EQ(inverse_normal_cdf(0.5), 0.0);
}

}  // namespace
}  // namespace rsde
