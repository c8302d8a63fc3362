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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "rsde/rng.hpp"
#include "rsde/sdf.hpp"
#include "rsde/vec.hpp"

namespace rsde::geometry {

// Tolerance for geometric predicates (boundary membership, cone checks).
inline constexpr double kGeoEps = 1e-12;

// {x : <normal, x> >= offset}; normal is stored with unit length.
struct HalfSpace {
  Vec normal;
  double offset = 0.0;
};

// [lower, upper] in 1D; either end may be infinite.
struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

struct Box {
  Vec lower;
  Vec upper;
};

struct Ball {
  Vec center;
  double radius = 1.0;
};

// {inner <= |x - center| <= outer}.
struct Annulus {
  Vec center;
  double inner = 0.5;
  double outer = 1.0;
};

struct SdfRegion {
  std::shared_ptr<const SignedDistanceField> field;
};

using Shape = std::variant<HalfSpace, Interval, Box, Ball, Annulus, SdfRegion>;

// Designated boundary subset used for the restricted local time.
struct BoundaryPredicate {
  std::string name = "all";
  std::function<bool(const Vec&)> test;

  bool operator()(const Vec& x) const { return !test || test(x); }

  static BoundaryPredicate all() { return {}; }
  static BoundaryPredicate none() {
    return {"none", [](const Vec&) { return false; }};
  }
};

enum class ReflectionScheme {
  // Exact folding for Interval and HalfSpace, nearest-point projection otherwise.
  kAuto,
  // Nearest-point projection for every kind.
  kProjection,
};

class Domain {
 public:
  static Domain half_space(Vec normal, double offset);
  static Domain interval(double lower, double upper);
  static Domain box(Vec lower, Vec upper);
  static Domain ball(Vec center, double radius);
  static Domain annulus(Vec center, double inner, double outer);
  static Domain sdf(std::shared_ptr<const SignedDistanceField> field);

  Domain& with_r0(double r0);
  Domain& with_tilde_boundary(BoundaryPredicate predicate);

  int dim() const { return dim_; }
  bool convex() const { return convex_; }
  const std::optional<double>& r0() const { return r0_; }
  const Shape& shape() const { return shape_; }
  const BoundaryPredicate& tilde_boundary() const { return tilde_; }
  std::string kind_name() const;

  // Axis-aligned bounds of the closure; components may be infinite.
  std::pair<Vec, Vec> bounding_box() const;
  bool bounded() const;
  double diameter() const;

 private:
  Domain(Shape shape, int dim, bool convex) : shape_(std::move(shape)), dim_(dim), convex_(convex) {}

  Shape shape_;
  int dim_;
  bool convex_;
  std::optional<double> r0_;
  BoundaryPredicate tilde_;
};

struct ReflectionOutcome {
  Vec position;
  double local_time_increment = 0.0;
  double tilde_local_time_increment = 0.0;
  bool hit_boundary = false;
};

// Closed-domain membership with kGeoEps slack at the boundary.
bool contains(const Domain& domain, const Vec& x);

// Positive inside, zero on the boundary, negative outside.
double signed_distance(const Domain& domain, const Vec& x);

// Unit inward normal at a boundary point. At box corners this is the
// normalised sum of the adjacent face normals. Throws GeometryError when x
// is off the boundary or the normal cone at x is empty.
Vec inward_normal(const Domain& domain, const Vec& x);

// Nearest point of the closed domain (identity inside).
Vec project(const Domain& domain, const Vec& x);

struct FoldOutcome {
  double position = 0.0;
  double local_time_increment = 0.0;
  double tilde_local_time_increment = 0.0;
};

// Repeated mirror folding of y into the interval; each fold adds twice its
// depth to the local time.
FoldOutcome fold_into_interval(const Interval& iv, double y, bool tilde_lower, bool tilde_upper);

// One discrete Skorokhod step from x in the closure by `displacement`.
// The local-time increment is the total length of the reflection pushes:
// 2 * depth per fold for the folding scheme, |projection correction| for
// the projection scheme.
ReflectionOutcome reflect_step(const Domain& domain, const Vec& x, const Vec& displacement,
                               ReflectionScheme scheme = ReflectionScheme::kAuto);

// Random boundary point / random point of the closure. Unbounded domains are
// sampled inside a ball of radius `window` around a reference point.
Vec sample_boundary(const Domain& domain, CounterRng& rng, double window = 10.0);
Vec sample_closure(const Domain& domain, CounterRng& rng, double window = 10.0);

struct ConeCertificate {
  std::size_t pairs = 0;
  double r0 = 0.0;
  // min over sampled pairs of <y-x, n(x)> + |y-x|^2 / (2 r0)
  double worst_interior_cone = 0.0;
  // min over sampled pairs of <y-x, n(x)>; only meaningful for convex kinds
  double worst_convex = 0.0;
  bool convex_checked = false;
  bool pass = false;
  Vec worst_x;
  Vec worst_y;
};

// Empirical check of the interior-cone inequality on sampled pairs
// (x on the boundary, y in the closure). Sampling, not a proof.
ConeCertificate certify_interior_cone(const Domain& domain, std::size_t n_samples, double r0,
                                      std::uint64_t seed);

}  // namespace rsde::geometry
