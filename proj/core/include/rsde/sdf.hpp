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

#include <memory>
#include <string>
#include <utility>

#include "rsde/vec.hpp"

namespace rsde::geometry {

// Signed distance to the boundary of a region, positive inside. Only the
// built-in fields below exist; configs refer to them by name.
class SignedDistanceField {
 public:
  virtual ~SignedDistanceField() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual double value(const Vec& x) const = 0;
  // Gradient of value(); points into the region, unit length where smooth.
  virtual Vec gradient(const Vec& x) const = 0;
  virtual bool convex() const = 0;
  // True when x is a boundary kink with an empty inward normal cone.
  virtual bool reentrant_corner(const Vec& /*x*/) const { return false; }
  // Axis-aligned bounding box of the closed region.
  virtual std::pair<Vec, Vec> bounds() const = 0;
};

std::shared_ptr<const SignedDistanceField> make_disc_sdf(Vec center, double radius);

// Box with half extents `half` around `center`, Minkowski-inflated by `radius`.
std::shared_ptr<const SignedDistanceField> make_rounded_box_sdf(Vec center, Vec half,
                                                                double radius);

// Union of two overlapping discs; non-convex, with two re-entrant corners.
std::shared_ptr<const SignedDistanceField> make_disc_union_sdf(Vec c1, double r1, Vec c2,
                                                               double r2);

}  // namespace rsde::geometry
