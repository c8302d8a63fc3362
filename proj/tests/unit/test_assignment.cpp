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

#include <algorithm>
#include <numeric>

#include "rsde/assignment.hpp"
#include "rsde/rng.hpp"

namespace rsde::transport {
namespace {

std::vector<double> random_costs(std::size_t m, std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, StreamTag::kTest, m, n);
  std::vector<double> c(m * n);
  for (auto& v : c) v = rng.uniform() * 10.0;
  return c;
}

double brute_force(const std::vector<double>& c, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c[i * n + p[i]];
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

TEST(Assignment, MatchesBruteForce) {
  for (std::size_t n = 1; n <= 7; ++n)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto c = random_costs(n, n, seed);
      const auto r = solve_assignment(c, n);
      EXPECT_NEAR(r.cost, brute_force(c, n), 1e-9);
    }
}

TEST(Assignment, IsPermutationWithDualCertificate) {
  const std::size_t n = 60;
  const auto c = random_costs(n, n, 77);
  const auto r = solve_assignment(c, n);
  std::vector<bool> used(n, false);
  double primal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ASSERT_FALSE(used[r.row_to_col[i]]);
    used[r.row_to_col[i]] = true;
    primal += c[i * n + r.row_to_col[i]];
  }
  EXPECT_NEAR(primal, r.cost, 1e-9);
  double dual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dual += r.row_dual[i] + r.col_dual[i];
    for (std::size_t j = 0; j < n; ++j) EXPECT_LE(r.row_dual[i] + r.col_dual[j], c[i * n + j] + 1e-9);
    EXPECT_NEAR(r.row_dual[i] + r.col_dual[r.row_to_col[i]], c[i * n + r.row_to_col[i]], 1e-9);
  }
  EXPECT_NEAR(dual, r.cost, 1e-8);
}

TEST(Transport, UniformWeightsMatchAssignment) {
  const std::size_t n = 12;
  const auto c = random_costs(n, n, 5);
  const std::vector<double> w(n, 1.0 / n);
  const auto t = solve_transport(c, w, w);
  EXPECT_NEAR(t.cost, solve_assignment(c, n).cost / n, 1e-12);
}

TEST(Transport, FeasiblePlanAndStrongDuality) {
  const std::size_t m = 9, n = 6;
  const auto c = random_costs(m, n, 8);
  CounterRng rng(1, StreamTag::kTest, 0, 0);
  std::vector<double> a(m), b(n);
  for (auto& v : a) v = rng.uniform() + 0.1;
  for (auto& v : b) v = rng.uniform() + 0.1;
  const double sa = std::accumulate(a.begin(), a.end(), 0.0), sb = std::accumulate(b.begin(), b.end(), 0.0);
  for (auto& v : a) v /= sa;
  for (auto& v : b) v /= sb;
  const auto t = solve_transport(c, a, b);
  std::vector<double> out(m, 0.0), in(n, 0.0);
  double primal = 0.0;
  for (const auto& e : t.plan) {
    EXPECT_GE(e.mass, 0.0);
    out[e.source] += e.mass;
    in[e.sink] += e.mass;
    primal += e.mass * c[e.source * n + e.sink];
    EXPECT_NEAR(t.source_dual[e.source] + t.sink_dual[e.sink], c[e.source * n + e.sink], 1e-9);
  }
  for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(out[i], a[i], 1e-12);
  for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(in[j], b[j], 1e-12);
  double dual = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    dual += a[i] * t.source_dual[i];
    for (std::size_t j = 0; j < n; ++j) EXPECT_LE(t.source_dual[i] + t.sink_dual[j], c[i * n + j] + 1e-9);
  }
  for (std::size_t j = 0; j < n; ++j) dual += b[j] * t.sink_dual[j];
  EXPECT_NEAR(primal, t.cost, 1e-12);
  EXPECT_NEAR(dual, t.cost, 1e-9);
}

}  // namespace
}  // namespace rsde::transport
