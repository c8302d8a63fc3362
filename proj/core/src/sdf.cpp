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

#include "rsde/sdf.hpp"

#include <algorithm>
#include <cmath>

namespace rsde::geometry {
namespace {

Vec unit_or_axis(const Vec& v) {
  const double n = norm(v);
  if (n > 0.0) return v / n;
  return Vec::unit(v.dim(), 0);
}

class DiscSdf final : public SignedDistanceField {
 public:
  DiscSdf(Vec center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0)) throw InvalidArgument("disc sdf: radius must be positive");
  }
  int dim() const override { return center_.dim(); }
  std::string name() const override { return "disc"; }
  double value(const Vec& x) const override { return radius_ - norm(x - center_); }
  Vec gradient(const Vec& x) const override { return -unit_or_axis(x - center_); }
  bool convex() const override { return true; }
  std::pair<Vec, Vec> bounds() const override {
    return {center_ - Vec::filled(dim(), radius_), center_ + Vec::filled(dim(), radius_)};
  }

 private:
  Vec center_;
  double radius_;
};

class RoundedBoxSdf final : public SignedDistanceField {
 public:
  RoundedBoxSdf(Vec center, Vec half, double radius)
      : center_(center), half_(half), radius_(radius) {
    if (half.dim() != center.dim()) throw InvalidArgument("rounded_box sdf: dimension mismatch");
    for (double h : half)
      if (!(h >= 0.0)) throw InvalidArgument("rounded_box sdf: half extents must be >= 0");
    if (!(radius >= 0.0)) throw InvalidArgument("rounded_box sdf: radius must be >= 0");
  }
  int dim() const override { return center_.dim(); }
  std::string name() const override { return "rounded_box"; }

  double value(const Vec& x) const override {
    Vec q(dim());
    Vec outside(dim());
    double qmax = -INFINITY;
    for (int i = 0; i < dim(); ++i) {
      q[i] = std::abs(x[i] - center_[i]) - half_[i];
      outside[i] = std::max(q[i], 0.0);
      qmax = std::max(qmax, q[i]);
    }
    return -(norm(outside) + std::min(qmax, 0.0) - radius_);
  }

  Vec gradient(const Vec& x) const override {
    Vec q(dim());
    Vec outside(dim());
    int argmax = 0;
    for (int i = 0; i < dim(); ++i) {
      q[i] = std::abs(x[i] - center_[i]) - half_[i];
      outside[i] = std::max(q[i], 0.0);
      if (q[i] > q[argmax]) argmax = i;
    }
    Vec g(dim());
    if (norm(outside) > 0.0) {
      g = outside / norm(outside);
    } else {
      g[argmax] = 1.0;
    }
    for (int i = 0; i < dim(); ++i)
      if (x[i] < center_[i]) g[i] = -g[i];
    return -g;
  }

  bool convex() const override { return true; }
  std::pair<Vec, Vec> bounds() const override {
    Vec ext = half_ + Vec::filled(dim(), radius_);
    return {center_ - ext, center_ + ext};
  }

 private:
  Vec center_;
  Vec half_;
  double radius_;
};

class DiscUnionSdf final : public SignedDistanceField {
 public:
  DiscUnionSdf(Vec c1, double r1, Vec c2, double r2) : a_(c1, r1), b_(c2, r2), c1_(c1), c2_(c2), r1_(r1), r2_(r2) {
    if (c1.dim() != c2.dim()) throw InvalidArgument("disc_union sdf: dimension mismatch");
    const double gap = norm(c1 - c2);
    if (!(gap < r1 + r2) || !(gap > std::abs(r1 - r2)))
      throw InvalidArgument("disc_union sdf: discs must overlap without nesting");
  }
  int dim() const override { return a_.dim(); }
  std::string name() const override { return "disc_union"; }
  double value(const Vec& x) const override { return std::max(a_.value(x), b_.value(x)); }
  Vec gradient(const Vec& x) const override {
    return a_.value(x) >= b_.value(x) ? a_.gradient(x) : b_.gradient(x);
  }
  bool convex() const override { return false; }
  bool reentrant_corner(const Vec& x) const override {
    const double tol = 1e-9 * std::max(1.0, norm(x));
    return std::abs(a_.value(x)) <= tol && std::abs(b_.value(x)) <= tol;
  }
  std::pair<Vec, Vec> bounds() const override {
    Vec lo(dim()), hi(dim());
    for (int i = 0; i < dim(); ++i) {
      lo[i] = std::min(c1_[i] - r1_, c2_[i] - r2_);
      hi[i] = std::max(c1_[i] + r1_, c2_[i] + r2_);
    }
    return {lo, hi};
  }

 private:
  DiscSdf a_;
  DiscSdf b_;
  Vec c1_, c2_;
  double r1_, r2_;
};

}  // namespace

std::shared_ptr<const SignedDistanceField> make_disc_sdf(Vec center, double radius) {
  return std::make_shared<DiscSdf>(center, radius);
}

std::shared_ptr<const SignedDistanceField> make_rounded_box_sdf(Vec center, Vec half,
                                                                double radius) {
  return std::make_shared<RoundedBoxSdf>(center, half, radius);
}

std::shared_ptr<const SignedDistanceField> make_disc_union_sdf(Vec c1, double r1, Vec c2,
                                                               double r2) {
  return std::make_shared<DiscUnionSdf>(c1, r1, c2, r2);
}

}  // namespace rsde::geometry
