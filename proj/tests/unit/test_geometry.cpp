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
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rsde/error.hpp"
#include "rsde/geometry.hpp"

namespace rsde::geometry {
namespace {

double len(const Vec& a) { return norm(a); }

std::vector<Domain> all_domains() {
  std::vector<Domain> ds;
  ds.push_back(Domain::half_space(Vec{1.0, 0.0}, 0.0));
  ds.push_back(Domain::half_space(Vec{1.0, 2.0, -1.0}, 0.5));
  ds.push_back(Domain::interval(0.0, 1.0));
  ds.push_back(Domain::interval(0.0, std::numeric_limits<double>::infinity()));
  ds.push_back(Domain::interval(-std::numeric_limits<double>::infinity(), 2.0));
  ds.push_back(Domain::box(Vec{0.0, 0.0}, Vec{1.0, 2.0}));
  ds.push_back(Domain::box(Vec{-1.0, -1.0, -1.0}, Vec{1.0, 1.0, 1.0}));
  ds.push_back(Domain::ball(Vec{0.0, 0.0}, 1.0));
  ds.push_back(Domain::ball(Vec{1.0, 0.0, 0.0}, 2.0));
  ds.push_back(Domain::annulus(Vec{0.0, 0.0}, 0.5, 1.0));
  ds.push_back(Domain::sdf(make_disc_sdf(Vec{0.5, 0.5}, 0.5)));
  ds.push_back(Domain::sdf(make_rounded_box_sdf(Vec{0.0, 0.0}, Vec{1.0, 0.5}, 0.2)));
  ds.push_back(Domain::sdf(make_disc_union_sdf(Vec{-0.5, 0.0}, 1.0, Vec{0.5, 0.0}, 1.0)));
  return ds;
}

TEST(Contains, Examples) {
  EXPECT_TRUE(contains(Domain::interval(0, 1), Vec{0.5}));
  EXPECT_TRUE(contains(Domain::interval(0, 1), Vec{0.0}));
  EXPECT_FALSE(contains(Domain::ball(Vec{0.0, 0.0}, 1.0), Vec{1.1, 0.0}));
  EXPECT_TRUE(contains(Domain::interval(0, 1), Vec{1.0 + 0.5e-12}));
  EXPECT_FALSE(contains(Domain::interval(0, 1), Vec{1.0 + 1e-9}));
}

TEST(Contains, DimensionMismatchThrows) {
  EXPECT_THROW(contains(Domain::interval(0, 1), Vec{0.5, 0.5}), InvalidArgument);
  EXPECT_THROW(signed_distance(Domain::ball(Vec{0.0, 0.0}, 1.0), Vec{0.5}), InvalidArgument);
}

TEST(InwardNormal, HalfSpace) {
  const Vec n = inward_normal(Domain::half_space(Vec{1.0, 0.0}, 0.0), Vec{0.0, 3.7});
  EXPECT_DOUBLE_EQ(n[0], 1.0);
  EXPECT_DOUBLE_EQ(n[1], 0.0);
}

TEST(InwardNormal, Ball) {
  const Vec n = inward_normal(Domain::ball(Vec{0.0, 0.0}, 2.0), Vec{2.0, 0.0});
  EXPECT_NEAR(n[0], -1.0, 1e-15);
  EXPECT_NEAR(n[1], 0.0, 1e-15);
}

TEST(InwardNormal, BoxCornerIsValidCone) {
  const Domain box = Domain::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  const Vec x{0.0, 0.0};
  const Vec n = inward_normal(box, x);
  EXPECT_NEAR(n[0], 1.0 / std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(n[1], 1.0 / std::numbers::sqrt2, 1e-15);
  for (int i = 0; i <= 50; ++i)
    for (int j = 0; j <= 50; ++j) {
      const Vec y{i / 50.0, j / 50.0};
      EXPECT_GE(dot(y - x, n), -kGeoEps);
    }
}

TEST(InwardNormal, Errors) {
  EXPECT_THROW(inward_normal(Domain::ball(Vec{0.0, 0.0}, 1.0), Vec{0.5, 0.0}), GeometryError);
  // Re-entrant kink where the two discs meet: empty normal cone.
  const auto field = make_disc_union_sdf(Vec{-0.5, 0.0}, 1.0, Vec{0.5, 0.0}, 1.0);
  const Vec kink{0.0, std::sqrt(0.75)};
  EXPECT_THROW(inward_normal(Domain::sdf(field), kink), GeometryError);
}

TEST(SignedDistance, Examples) {
  EXPECT_NEAR(signed_distance(Domain::interval(0, 1), Vec{0.3}), 0.3, 1e-15);
  EXPECT_NEAR(signed_distance(Domain::ball(Vec{0.0, 0.0}, 1.0), Vec{0.0, 0.0}), 1.0, 1e-15);
  EXPECT_LT(signed_distance(Domain::ball(Vec{0.0, 0.0}, 1.0), Vec{2.0, 0.0}), 0.0);
}

TEST(SignedDistance, AnnulusAgainstBoundarySamples) {
  const Domain ann = Domain::annulus(Vec{0.0, 0.0}, 0.5, 1.0);
  const Vec x{0.75, 0.0};
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20000; ++i) {
    const double th = 2.0 * std::numbers::pi * i / 20000.0;
    for (double r : {0.5, 1.0}) best = std::min(best, len(x - Vec{r * std::cos(th), r * std::sin(th)}));
  }
  EXPECT_NEAR(signed_distance(ann, x), 0.25, 1e-15);
  EXPECT_NEAR(signed_distance(ann, x), best, 1e-8);
}

TEST(ReflectStep, HalfSpaceFold) {
  const Domain hs = Domain::half_space(Vec{1.0, 0.0}, 0.0);
  const auto out = reflect_step(hs, Vec{0.1, 0.0}, Vec{-0.5, 0.0});
  EXPECT_NEAR(out.position[0], 0.4, 1e-15);
  EXPECT_NEAR(out.position[1], 0.0, 1e-15);
  // One fold of depth 0.4 pushes the path back by 2 * 0.4.
  EXPECT_NEAR(out.local_time_increment, 0.8, 1e-15);
  EXPECT_TRUE(out.hit_boundary);
}

TEST(ReflectStep, HalfSpaceProjection) {
  const Domain hs = Domain::half_space(Vec{1.0, 0.0}, 0.0);
  const auto out = reflect_step(hs, Vec{0.1, 0.0}, Vec{-0.5, 0.0}, ReflectionScheme::kProjection);
  EXPECT_NEAR(out.position[0], 0.0, 1e-15);
  EXPECT_NEAR(out.local_time_increment, 0.4, 1e-15);
}

TEST(ReflectStep, InteriorMove) {
  const auto out = reflect_step(Domain::interval(0, 1), Vec{0.5}, Vec{0.2});
  EXPECT_NEAR(out.position[0], 0.7, 1e-15);
  EXPECT_EQ(out.local_time_increment, 0.0);
  EXPECT_FALSE(out.hit_boundary);
}

TEST(ReflectStep, BallProjection) {
  const auto out = reflect_step(Domain::ball(Vec{0.0, 0.0}, 1.0), Vec{0.9, 0.0}, Vec{0.3, 0.3});
  const double r = std::hypot(1.2, 0.3);
  EXPECT_NEAR(out.position[0], 1.2 / r, 1e-14);
  EXPECT_NEAR(out.position[1], 0.3 / r, 1e-14);
  EXPECT_NEAR(out.local_time_increment, r - 1.0, 1e-14);
  EXPECT_NEAR(out.local_time_increment, 0.23693, 1e-5);
}

TEST(ReflectStep, IntervalMultipleFolds) {
  const auto out = reflect_step(Domain::interval(0, 1), Vec{0.5}, Vec{2.2});
  EXPECT_NEAR(out.position[0], testing::tent_fold(2.7, 0.0, 1.0), 1e-14);
  // Folds at 1 (depth 1.7) and then at 0 (depth 0.7).
  EXPECT_NEAR(out.local_time_increment, 2.0 * 1.7 + 2.0 * 0.7, 1e-12);
}

TEST(ReflectStep, TildeBoundary) {
  Domain iv = Domain::interval(0, 1);
  iv.with_tilde_boundary({"lower", [](const Vec& x) { return x[0] < 0.5; }});
  const auto up = reflect_step(iv, Vec{0.9}, Vec{0.3});
  EXPECT_GT(up.local_time_increment, 0.0);
  EXPECT_EQ(up.tilde_local_time_increment, 0.0);
  const auto down = reflect_step(iv, Vec{0.1}, Vec{-0.3});
  EXPECT_EQ(down.tilde_local_time_increment, down.local_time_increment);
}

TEST(ReflectStep, NonFiniteDisplacementThrows) {
  EXPECT_THROW(reflect_step(Domain::interval(0, 1), Vec{0.5}, Vec{std::nan("")}), InvalidArgument);
  EXPECT_THROW(reflect_step(Domain::ball(Vec{0.0, 0.0}, 1.0), Vec{0.0, 0.0},
                            Vec{std::numeric_limits<double>::infinity(), 0.0}),
               InvalidArgument);
}

TEST(ReflectStep, ContainmentProperty) {
  for (const auto& d : all_domains()) {
    CounterRng rng(99, StreamTag::kTest, static_cast<std::uint64_t>(d.dim()), 0);
    const double diam = d.bounded() ? d.diameter() : 10.0;
    for (auto scheme : {ReflectionScheme::kAuto, ReflectionScheme::kProjection}) {
      for (int i = 0; i < 2000; ++i) {
        const Vec x = sample_closure(d, rng);
        Vec disp(d.dim());
        const double mag = 10.0 * diam * rng.uniform();
        for (int a = 0; a < d.dim(); ++a) disp[a] = rng.normal();
        disp = disp * (mag / std::max(len(disp), 1e-300));
        const auto out = reflect_step(d, x, disp, scheme);
        ASSERT_TRUE(contains(d, out.position)) << d.kind_name();
        ASSERT_GE(out.local_time_increment, 0.0);
        ASSERT_LE(out.tilde_local_time_increment, out.local_time_increment);
        if (contains(d, x + disp)) ASSERT_EQ(out.local_time_increment, 0.0);
      }
    }
  }
}

TEST(ReflectStep, IntervalFoldMatchesTentMapPerStep) {
  const double lo = -1.0, hi = 2.0, width = hi - lo;
  const Domain iv = Domain::interval(lo, hi);
  CounterRng rng(4, StreamTag::kTest, 0, 0);
  double x = 0.3;
  for (int k = 0; k < 5000; ++k) {
    const double d = 4.0 * rng.normal();
    const double y = x + d;
    const double over = y > hi ? y - hi : (y < lo ? lo - y : 0.0);
    double l = 0.0;
    for (int j = 0; over - j * width > 0.0; ++j) l += 2.0 * (over - j * width);
    const auto out = reflect_step(iv, Vec{x}, Vec{d});
    ASSERT_NEAR(out.position[0], testing::tent_fold(y, lo, hi), 1e-12);
    ASSERT_NEAR(out.local_time_increment, l, 1e-9);
    x = out.position[0];
  }
}

TEST(ReflectStep, IntervalProjectionMatchesClampRecursion) {
  const Domain iv = Domain::interval(-1.0, 2.0);
  CounterRng rng(14, StreamTag::kTest, 0, 0);
  double x = 0.3, expected = 0.3, l = 0.0, expected_l = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const double d = 0.8 * rng.normal();
    const auto out = reflect_step(iv, Vec{x}, Vec{d}, ReflectionScheme::kProjection);
    x = out.position[0];
    l += out.local_time_increment;
    const double y = expected + d;
    const double c = std::clamp(y, -1.0, 2.0);
    expected_l += std::abs(y - c);
    expected = c;
    ASSERT_NEAR(x, expected, 1e-12);
    ASSERT_NEAR(l, expected_l, 1e-9);
  }
}

TEST(ReflectStep, HalfLineProjectionMatchesSkorokhodMap) {
  const Domain hl = Domain::interval(0.0, std::numeric_limits<double>::infinity());
  CounterRng rng(15, StreamTag::kTest, 0, 0);
  double x = 0.5, free = 0.5, running_min = 0.5, l = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const double d = 0.2 * rng.normal();
    const auto out = reflect_step(hl, Vec{x}, Vec{d}, ReflectionScheme::kProjection);
    x = out.position[0];
    l += out.local_time_increment;
    free += d;
    running_min = std::min(running_min, free);
    const double push = std::max(0.0, -running_min);
    ASSERT_NEAR(x, free + push, 1e-9);
    ASSERT_NEAR(l, push, 1e-9);
  }
}

TEST(ReflectStep, HalfSpaceProjectionMatchesSkorokhodMap) {
  const Domain hs = Domain::half_space(Vec{0.0, 1.0}, 1.0);  // {x_2 >= 1}
  CounterRng rng(5, StreamTag::kTest, 0, 0);
  Vec x{0.0, 1.5};
  double s = 1.5, running_min = 1.5, l = 0.0, tangential = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const Vec d{0.1 * rng.normal(), 0.1 * rng.normal()};
    const auto out = reflect_step(hs, x, d, ReflectionScheme::kProjection);
    x = out.position;
    l += out.local_time_increment;
    s += d[1];
    tangential += d[0];
    running_min = std::min(running_min, s);
    const double push = std::max(0.0, 1.0 - running_min);
    ASSERT_NEAR(x[1], s + push, 1e-12);
    ASSERT_NEAR(x[0], tangential, 1e-12);
    ASSERT_NEAR(l, push, 1e-12);
  }
}

TEST(ReflectStep, HalfSpaceFoldMatchesAnalyticPath) {
  // Folding on a half line tracks |free path| reflected about the offset.
  const Domain hs = Domain::half_space(Vec{1.0}, 0.0);
  CounterRng rng(6, StreamTag::kTest, 0, 0);
  double x = 0.2;
  for (int k = 0; k < 5000; ++k) {
    const double d = 0.3 * rng.normal();
    const double expected = std::abs(x + d);
    x = reflect_step(hs, Vec{x}, Vec{d}).position[0];
    ASSERT_NEAR(x, expected, 1e-12);
  }
}

TEST(InwardNormal, AgreesWithSignedDistanceGradient) {
  for (const auto& d : all_domains()) {
    if (d.dim() != 2) continue;
    CounterRng rng(7, StreamTag::kTest, 0, 0);
    for (int i = 0; i < 200; ++i) {
      const Vec x = sample_boundary(d, rng);
      Vec n;
      try {
        n = inward_normal(d, x);
      } catch (const GeometryError&) {
        continue;  // kinks
      }
      EXPECT_NEAR(len(n), 1.0, 1e-12);
      const double e = 1e-6;
      Vec g(2);
      for (int a = 0; a < 2; ++a) {
        Vec p = x, m = x;
        p[a] += e;
        m[a] -= e;
        g[a] = (signed_distance(d, p) - signed_distance(d, m)) / (2 * e);
      }
      EXPECT_GT(dot(n, g), 0.0) << d.kind_name();
    }
  }
}

TEST(ReflectStep, LocalTimeAccruesNearBoundary) {
  const double h = 1e-3;
  const double reach = 4.0 * std::sqrt(h);
  for (const auto& d : {Domain::interval(0, 1), Domain::ball(Vec{0.0, 0.0}, 1.0),
                        Domain::annulus(Vec{0.0, 0.0}, 0.5, 1.0)}) {
    double total = 0.0, far = 0.0;
    for (std::uint64_t p = 0; p < 100; ++p) {
      CounterRng rng(8, StreamTag::kTest, p, 0);
      Vec x = sample_closure(d, rng);
      for (int k = 0; k < 1000; ++k) {
        Vec disp(d.dim());
        for (int a = 0; a < d.dim(); ++a) disp[a] = std::sqrt(h) * rng.normal();
        const double before = signed_distance(d, x);
        const auto out = reflect_step(d, x, disp);
        total += out.local_time_increment;
        if (before > reach) far += out.local_time_increment;
        x = out.position;
      }
    }
    EXPECT_GT(total, 0.0);
    EXPECT_LT(far, 0.01 * total) << d.kind_name();
  }
}

TEST(CertifyInteriorCone, Examples) {
  EXPECT_TRUE(certify_interior_cone(Domain::ball(Vec{0.0, 0.0}, 1.0), 10000, 0.7, 1).pass);
  EXPECT_TRUE(certify_interior_cone(Domain::box(Vec{0.0, 0.0}, Vec{1.0, 1.0}), 10000, 3.0, 1).pass);
  const Domain ann = Domain::annulus(Vec{0.0, 0.0}, 0.5, 1.0);
  EXPECT_FALSE(certify_interior_cone(ann, 10000, 1.0, 1).pass);
  EXPECT_TRUE(certify_interior_cone(ann, 10000, 0.4, 1).pass);
}

TEST(CertifyInteriorCone, AnnulusThresholdBruteForce) {
  // Worst case of <y-x, n(x)> + |y-x|^2 / (2 r0) over dense grids on the
  // inner circle and the closure; changes sign at r0 = 0.5.
  auto worst = [](double r0) {
    double w = std::numeric_limits<double>::infinity();
    const Vec x{0.5, 0.0};
    const Vec n{1.0, 0.0};
    for (int i = 0; i <= 200; ++i)
      for (int j = 0; j <= 200; ++j) {
        const Vec y{-1.0 + i / 100.0, -1.0 + j / 100.0};
        const double r = len(y);
        if (r < 0.5 || r > 1.0) continue;
        const Vec u = y - x;
        w = std::min(w, dot(u, n) + dot(u, u) / (2.0 * r0));
      }
    return w;
  };
  EXPECT_LT(worst(1.0), -1e-3);
  EXPECT_GE(worst(0.4), -1e-12);
}

TEST(Domain, ConvexFlags) {
  EXPECT_TRUE(Domain::interval(0, 1).convex());
  EXPECT_TRUE(Domain::ball(Vec{0.0, 0.0}, 1.0).convex());
  EXPECT_FALSE(Domain::annulus(Vec{0.0, 0.0}, 0.5, 1.0).convex());
}

}  // namespace
}  // namespace rsde::geometry
