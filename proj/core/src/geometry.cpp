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

#include "rsde/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rsde::geometry {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxNewtonIterations = 50;
constexpr double kNewtonTol = 1e-10;
constexpr int kMaxFolds = 10'000'000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double scale_tol(const Vec& x) {
  double m = 1.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return kGeoEps * m;
}

[[noreturn, gnu::cold, gnu::noinline]] void dim_mismatch(const Domain& d, const Vec& x) {
  throw InvalidArgument("dimension mismatch: point has dim " + std::to_string(x.dim()) +
                        ", domain has dim " + std::to_string(d.dim()));
}

inline void check_dim(const Domain& d, const Vec& x) {
  if (x.dim() != d.dim()) [[unlikely]]
    dim_mismatch(d, x);
}

Vec random_unit(int dim, CounterRng& rng) {
  while (true) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    const double n = norm(v);
    if (n > 1e-12) return v / n;
  }
}

// Damped Newton along the sdf gradient until the point is on or inside the
// boundary.
Vec project_sdf(const SignedDistanceField& f, const Vec& y) {
  Vec p = y;
  double s = f.value(p);
  if (s >= 0.0) return p;
  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    const Vec g = f.gradient(p);
    const double g2 = norm2(g);
    if (!(g2 > 0.0) || !g.all_finite())
      throw GeometryError("sdf projection: degenerate gradient at iteration " + std::to_string(it));
    double step = 1.0;
    Vec next = p - (s / g2) * g;
    double s_next = f.value(next);
    while (std::abs(s_next) >= std::abs(s) && step > 1e-6) {
      step *= 0.5;
      next = p - (step * s / g2) * g;
      s_next = f.value(next);
    }
    p = next;
    s = s_next;
    if (std::abs(s) <= kNewtonTol) {
      for (int nudge = 0; nudge < 4 && s < 0.0; ++nudge) {
        p += (-s + 1e-15) * f.gradient(p);
        s = f.value(p);
      }
      if (s >= -kGeoEps) return p;
    }
  }
  throw GeometryError("sdf projection did not converge after " +
                      std::to_string(kMaxNewtonIterations) + " iterations (residual " +
                      std::to_string(s) + ")");
}

}  // namespace

Domain Domain::half_space(Vec normal, double offset) {
  const double n = norm(normal);
  if (!(n > 0.0) || !normal.all_finite()) throw InvalidArgument("half_space: normal must be nonzero");
  if (!std::isfinite(offset)) throw InvalidArgument("half_space: offset must be finite");
  return Domain(HalfSpace{normal / n, offset / n}, normal.dim(), true);
}

Domain Domain::interval(double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper) || !(lower < upper))
    throw InvalidArgument("interval: require lower < upper");
  if (lower == -kInf && upper == kInf) throw InvalidArgument("interval: at least one end must be finite");
  return Domain(Interval{lower, upper}, 1, true);
}

Domain Domain::box(Vec lower, Vec upper) {
  if (lower.dim() != upper.dim()) throw InvalidArgument("box: dimension mismatch");
  for (int i = 0; i < lower.dim(); ++i)
    if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw InvalidArgument("box: require finite lower < upper on every axis");
  return Domain(Box{lower, upper}, lower.dim(), true);
}

Domain Domain::ball(Vec center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("ball: radius must be positive");
  return Domain(Ball{center, radius}, center.dim(), true);
}

Domain Domain::annulus(Vec center, double inner, double outer) {
  if (center.dim() < 2) throw InvalidArgument("annulus: dimension must be >= 2");
  if (!(inner > 0.0) || !(inner < outer) || !std::isfinite(outer))
    throw InvalidArgument("annulus: require 0 < inner < outer");
  return Domain(Annulus{center, inner, outer}, center.dim(), false);
}

Domain Domain::sdf(std::shared_ptr<const SignedDistanceField> field) {
  if (!field) throw InvalidArgument("sdf: null field");
  const int dim = field->dim();
  const bool convex = field->convex();
  return Domain(SdfRegion{std::move(field)}, dim, convex);
}

Domain& Domain::with_r0(double r0) {
  if (!(r0 > 0.0)) throw InvalidArgument("r0 must be positive");
  r0_ = r0;
  return *this;
}

Domain& Domain::with_tilde_boundary(BoundaryPredicate predicate) {
  tilde_ = std::move(predicate);
  return *this;
}

std::string Domain::kind_name() const {
  return std::visit(Overloaded{
                        [](const HalfSpace&) { return std::string("half_space"); },
                        [](const Interval&) { return std::string("interval"); },
                        [](const Box&) { return std::string("box"); },
                        [](const Ball&) { return std::string("ball"); },
                        [](const Annulus&) { return std::string("annulus"); },
                        [](const SdfRegion& s) { return "sdf:" + s.field->name(); },
                    },
                    shape_);
}

std::pair<Vec, Vec> Domain::bounding_box() const {
  return std::visit(
      Overloaded{
          [&](const HalfSpace& h) {
            Vec lo = Vec::filled(dim_, -kInf), hi = Vec::filled(dim_, kInf);
            // Axis-aligned half spaces are bounded on one side.
            for (int i = 0; i < dim_; ++i) {
              if (std::abs(h.normal[i]) == 1.0) {
                if (h.normal[i] > 0) lo[i] = h.offset;
                else hi[i] = -h.offset;
              }
            }
            return std::pair{lo, hi};
          },
          [](const Interval& i) { return std::pair{Vec{i.lower}, Vec{i.upper}}; },
          [](const Box& b) { return std::pair{b.lower, b.upper}; },
          [&](const Ball& b) {
            return std::pair{b.center - Vec::filled(dim_, b.radius),
                             b.center + Vec::filled(dim_, b.radius)};
          },
          [&](const Annulus& a) {
            return std::pair{a.center - Vec::filled(dim_, a.outer),
                             a.center + Vec::filled(dim_, a.outer)};
          },
          [](const SdfRegion& s) { return s.field->bounds(); },
      },
      shape_);
}

bool Domain::bounded() const { return std::isfinite(diameter()); }

double Domain::diameter() const {
  const auto [lo, hi] = bounding_box();
  return norm(hi - lo);
}

double signed_distance(const Domain& domain, const Vec& x) {
  check_dim(domain, x);
  return std::visit(Overloaded{
                        [&](const HalfSpace& h) { return dot(h.normal, x) - h.offset; },
                        [&](const Interval& i) { return std::min(x[0] - i.lower, i.upper - x[0]); },
                        [&](const Box& b) {
                          double inside = kInf;
                          double out2 = 0.0;
                          for (int k = 0; k < x.dim(); ++k) {
                            inside = std::min({inside, x[k] - b.lower[k], b.upper[k] - x[k]});
                            const double c = std::clamp(x[k], b.lower[k], b.upper[k]);
                            out2 += (x[k] - c) * (x[k] - c);
                          }
                          return out2 > 0.0 ? -std::sqrt(out2) : inside;
                        },
                        [&](const Ball& b) { return b.radius - norm(x - b.center); },
                        [&](const Annulus& a) {
                          const double r = norm(x - a.center);
                          return std::min(r - a.inner, a.outer - r);
                        },
                        [&](const SdfRegion& s) { return s.field->value(x); },
                    },
                    domain.shape());
}

bool contains(const Domain& domain, const Vec& x) {
  check_dim(domain, x);
  if (!x.all_finite()) throw InvalidArgument("contains: non-finite point");
  if (const auto* iv = std::get_if<Interval>(&domain.shape())) {
    const double tol = kGeoEps * std::max(1.0, std::abs(x[0]));
    return x[0] >= iv->lower - tol && x[0] <= iv->upper + tol;
  }
  return signed_distance(domain, x) >= -scale_tol(x);
}

Vec inward_normal(const Domain& domain, const Vec& x) {
  check_dim(domain, x);
  const double tol = scale_tol(x);
  if (std::abs(signed_distance(domain, x)) > tol)
    throw GeometryError("inward_normal: point is not on the boundary");
  return std::visit(
      Overloaded{
          [&](const HalfSpace& h) { return h.normal; },
          [&](const Interval& i) {
            return std::abs(x[0] - i.lower) <= tol ? Vec{1.0} : Vec{-1.0};
          },
          [&](const Box& b) {
            Vec n(x.dim());
            for (int k = 0; k < x.dim(); ++k) {
              if (std::abs(x[k] - b.lower[k]) <= tol) n[k] += 1.0;
              if (std::abs(x[k] - b.upper[k]) <= tol) n[k] -= 1.0;
            }
            const double len = norm(n);
            if (!(len > 0.0)) throw GeometryError("inward_normal: empty normal cone");
            return n / len;
          },
          [&](const Ball& b) {
            const Vec u = x - b.center;
            return -(u / norm(u));
          },
          [&](const Annulus& a) {
            const Vec u = x - a.center;
            const double r = norm(u);
            return std::abs(r - a.outer) <= tol ? -(u / r) : u / r;
          },
          [&](const SdfRegion& s) {
            if (s.field->reentrant_corner(x))
              throw GeometryError("inward_normal: empty normal cone at re-entrant corner");
            const Vec g = s.field->gradient(x);
            const double len = norm(g);
            if (!(len > 0.0)) throw GeometryError("inward_normal: degenerate sdf gradient");
            return g / len;
          },
      },
      domain.shape());
}

Vec project(const Domain& domain, const Vec& y) {
  check_dim(domain, y);
  return std::visit(
      Overloaded{
          [&](const HalfSpace& h) {
            const double s = dot(h.normal, y) - h.offset;
            return s >= 0.0 ? y : y - s * h.normal;
          },
          [&](const Interval& i) { return Vec{std::clamp(y[0], i.lower, i.upper)}; },
          [&](const Box& b) {
            Vec p = y;
            for (int k = 0; k < y.dim(); ++k) p[k] = std::clamp(y[k], b.lower[k], b.upper[k]);
            return p;
          },
          [&](const Ball& b) {
            const Vec u = y - b.center;
            const double r = norm(u);
            return r <= b.radius ? y : b.center + (b.radius / r) * u;
          },
          [&](const Annulus& a) {
            const Vec u = y - a.center;
            const double r = norm(u);
            if (r > a.outer) return a.center + (a.outer / r) * u;
            if (r < a.inner) {
              const Vec dir = r > 0.0 ? u / r : Vec::unit(y.dim(), 0);
              return a.center + a.inner * dir;
            }
            return y;
          },
          [&](const SdfRegion& s) { return project_sdf(*s.field, y); },
      },
      domain.shape());
}

FoldOutcome fold_into_interval(const Interval& iv, double y, bool tilde_lower, bool tilde_upper) {
  FoldOutcome out;
  out.position = y;
  for (int folds = 0; out.position < iv.lower || out.position > iv.upper; ++folds) {
    if (folds >= kMaxFolds) throw GeometryError("reflect_step: excursion too large to fold");
    double push;
    bool on_tilde;
    if (out.position < iv.lower) {
      push = 2.0 * (iv.lower - out.position);
      out.position = 2.0 * iv.lower - out.position;
      on_tilde = tilde_lower;
    } else {
      push = 2.0 * (out.position - iv.upper);
      out.position = 2.0 * iv.upper - out.position;
      on_tilde = tilde_upper;
    }
    out.local_time_increment += push;
    if (on_tilde) out.tilde_local_time_increment += push;
  }
  return out;
}

ReflectionOutcome reflect_step(const Domain& domain, const Vec& x, const Vec& displacement,
                               ReflectionScheme scheme) {
  check_dim(domain, x);
  check_dim(domain, displacement);
  if (!displacement.all_finite()) throw InvalidArgument("reflect_step: displacement is not finite");

  ReflectionOutcome out;
  Vec y = x + displacement;
  if (contains(domain, y)) {
    out.position = y;
    return out;
  }
  out.hit_boundary = true;
  const auto& tilde = domain.tilde_boundary();

  if (scheme == ReflectionScheme::kAuto) {
    if (const auto* h = std::get_if<HalfSpace>(&domain.shape())) {
      const double s = dot(h->normal, y) - h->offset;
      const Vec hit = y - s * h->normal;
      out.position = y - 2.0 * s * h->normal;
      out.local_time_increment = -2.0 * s;
      if (tilde(hit)) out.tilde_local_time_increment = out.local_time_increment;
      return out;
    }
    if (const auto* iv = std::get_if<Interval>(&domain.shape())) {
      const bool tilde_lower = std::isfinite(iv->lower) && tilde(Vec{iv->lower});
      const bool tilde_upper = std::isfinite(iv->upper) && tilde(Vec{iv->upper});
      const auto f = fold_into_interval(*iv, y[0], tilde_lower, tilde_upper);
      out.position = Vec{f.position};
      out.local_time_increment = f.local_time_increment;
      out.tilde_local_time_increment = f.tilde_local_time_increment;
      return out;
    }
  }

  out.position = project(domain, y);
  out.local_time_increment = norm(y - out.position);
  if (tilde(out.position)) out.tilde_local_time_increment = out.local_time_increment;
  return out;
}

Vec sample_boundary(const Domain& domain, CounterRng& rng, double window) {
  const int d = domain.dim();
  return std::visit(
      Overloaded{
          [&](const HalfSpace& h) {
            Vec p = h.offset * h.normal;
            if (d == 1) return p;
            Vec t(d);
            for (int k = 0; k < d; ++k) t[k] = rng.normal();
            t -= dot(t, h.normal) * h.normal;
            const double tn = norm(t);
            if (tn > 0.0) p += (window * rng.uniform() / tn) * t;
            return p;
          },
          [&](const Interval& i) {
            const bool lo = std::isfinite(i.lower), hi = std::isfinite(i.upper);
            if (lo && hi) return Vec{rng.uniform() < 0.5 ? i.lower : i.upper};
            return Vec{lo ? i.lower : i.upper};
          },
          [&](const Box& b) {
            Vec p(d);
            for (int k = 0; k < d; ++k) p[k] = b.lower[k] + rng.uniform() * (b.upper[k] - b.lower[k]);
            const auto axis = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
            p[axis] = rng.uniform() < 0.5 ? b.lower[axis] : b.upper[axis];
            return p;
          },
          [&](const Ball& b) { return b.center + b.radius * random_unit(d, rng); },
          [&](const Annulus& a) {
            const double wi = std::pow(a.inner, d - 1), wo = std::pow(a.outer, d - 1);
            const double r = rng.uniform() * (wi + wo) < wi ? a.inner : a.outer;
            return a.center + r * random_unit(d, rng);
          },
          [&](const SdfRegion& s) {
            const auto [lo, hi] = s.field->bounds();
            while (true) {
              Vec z(d);
              for (int k = 0; k < d; ++k) z[k] = lo[k] + rng.uniform() * (hi[k] - lo[k]);
              for (int it = 0; it < kMaxNewtonIterations; ++it) {
                const double v = s.field->value(z);
                if (std::abs(v) <= kGeoEps) break;
                const Vec g = s.field->gradient(z);
                z -= (v / norm2(g)) * g;
              }
              if (std::abs(s.field->value(z)) <= kGeoEps && !s.field->reentrant_corner(z)) return z;
            }
          },
      },
      domain.shape());
}

Vec sample_closure(const Domain& domain, CounterRng& rng, double window) {
  const int d = domain.dim();
  if (const auto* h = std::get_if<HalfSpace>(&domain.shape())) {
    Vec p = sample_boundary(domain, rng, window);
    return p + (window * rng.uniform()) * h->normal;
  }
  if (const auto* iv = std::get_if<Interval>(&domain.shape())) {
    if (std::isfinite(iv->lower) && std::isfinite(iv->upper))
      return Vec{iv->lower + rng.uniform() * (iv->upper - iv->lower)};
    if (std::isfinite(iv->lower)) return Vec{iv->lower + window * rng.uniform()};
    return Vec{iv->upper - window * rng.uniform()};
  }
  const auto [lo, hi] = domain.bounding_box();
  while (true) {
    Vec z(d);
    for (int k = 0; k < d; ++k) z[k] = lo[k] + rng.uniform() * (hi[k] - lo[k]);
    if (contains(domain, z)) return z;
  }
}

ConeCertificate certify_interior_cone(const Domain& domain, std::size_t n_samples, double r0,
                                      std::uint64_t seed) {
  if (n_samples < 1) throw InvalidArgument("certify_interior_cone: n_samples must be >= 1");
  if (!(r0 > 0.0)) throw InvalidArgument("certify_interior_cone: r0 must be positive");
  constexpr int kPartnersPerPoint = 8;

  ConeCertificate cert;
  cert.r0 = r0;
  cert.worst_interior_cone = kInf;
  cert.worst_convex = kInf;
  cert.convex_checked = domain.convex();
  for (std::size_t i = 0; i < n_samples; ++i) {
    CounterRng rng(seed, StreamTag::kCertify, i, 0);
    const Vec x = sample_boundary(domain, rng);
    const Vec n = inward_normal(domain, x);
    for (int j = 0; j < kPartnersPerPoint; ++j) {
      const Vec y = (j % 2 == 0) ? sample_boundary(domain, rng) : sample_closure(domain, rng);
      const Vec diff = y - x;
      const double inner = dot(diff, n);
      const double lcc = inner + norm2(diff) / (2.0 * r0);
      ++cert.pairs;
      if (lcc < cert.worst_interior_cone) {
        cert.worst_interior_cone = lcc;
        cert.worst_x = x;
        cert.worst_y = y;
      }
      cert.worst_convex = std::min(cert.worst_convex, inner);
    }
  }
  cert.pass = cert.worst_interior_cone >= -kGeoEps &&
              (!cert.convex_checked || cert.worst_convex >= -kGeoEps);
  return cert;
}

}  // namespace rsde::geometry
