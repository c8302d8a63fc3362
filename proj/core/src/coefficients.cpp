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

#include "rsde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsde::sde {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double param(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end() || it->second.empty()) return fallback;
  return it->second.front();
}

Vec param_vec(const Params& p, const std::string& key, int dim, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return Vec::filled(dim, fallback);
  if (it->second.size() == 1) return Vec::filled(dim, it->second.front());
  if (static_cast<int>(it->second.size()) != dim)
    throw InvalidArgument("parameter '" + key + "' has wrong length");
  return Vec::from_span(it->second);
}

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

constexpr int kMaxFastDegree = 6;

}  // namespace

double Potential::value(const Vec& x) const {
  switch (kind) {
    case Kind::kZero: return 0.0;
    case Kind::kQuadratic: return 0.5 * scale * norm2(x);
    case Kind::kDoubleWell: {
      const double r = norm2(x) - 1.0;
      return 0.25 * scale * r * r;
    }
  }
  return 0.0;
}

Vec Potential::gradient(const Vec& x) const {
  switch (kind) {
    case Kind::kZero: return Vec(x.dim());
    case Kind::kQuadratic: return scale * x;
    case Kind::kDoubleWell: return (scale * (norm2(x) - 1.0)) * x;
  }
  return Vec(x.dim());
}

double InteractionKernel::value(const Vec& u) const {
  if (kind == Kind::kZero) return 0.0;
  return scale * std::pow(norm(u), exponent);
}

Vec InteractionKernel::gradient(const Vec& u) const {
  if (kind == Kind::kZero) return Vec(u.dim());
  const double r = norm(u);
  if (r == 0.0) return Vec(u.dim());
  // scale * p * |u|^{p-2} u
  const double f = exponent == 2.0 ? 1.0 : std::pow(r, exponent - 2.0);
  return (scale * exponent * f) * u;
}

bool CoefficientSpec::depends_on_measure() const {
  return std::visit(Overloaded{
                        [](const GranularMedia& g) { return g.W.kind != InteractionKernel::Kind::kZero; },
                        [](const LinearMeanField& l) { return !l.B.is_zero(); },
                        [](const CustomDrift&) { return false; },
                    },
                    drift);
}

int CoefficientSpec::noise_dim(int dim) const {
  return std::visit(Overloaded{
                        [](const ConstantDiffusion& c) { return c.sigma.cols(); },
                        [dim](const ScalarDiffusion&) { return dim; },
                        [](const StateDependentDiffusion& s) { return s.noise_dim; },
                    },
                    diffusion);
}

Mat CoefficientSpec::sigma(const Vec& x, double t) const {
  return std::visit(Overloaded{
                        [](const ConstantDiffusion& c) { return c.sigma; },
                        [&](const ScalarDiffusion& s) { return Mat::identity(x.dim(), s.s); },
                        [&](const StateDependentDiffusion& s) { return s.fn(x, t); },
                    },
                    diffusion);
}

std::optional<double> CoefficientSpec::isotropic_diffusivity(int dim) const {
  if (const auto* s = std::get_if<ScalarDiffusion>(&diffusion)) return 0.5 * s->s * s->s;
  if (const auto* c = std::get_if<ConstantDiffusion>(&diffusion)) {
    if (c->sigma.rows() != dim) return std::nullopt;
    const Mat a = gram(c->sigma);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        const double expect = i == j ? a(0, 0) : 0.0;
        if (std::abs(a(i, j) - expect) > 1e-14 * std::max(1.0, std::abs(a(0, 0)))) return std::nullopt;
      }
    return 0.5 * a(0, 0);
  }
  return std::nullopt;
}

void CoefficientSpec::validate(const geometry::Domain& domain, bool require_nondegenerate,
                               std::uint64_t seed) const {
  const int d = domain.dim();
  std::visit(Overloaded{
                 [&](const GranularMedia&) {},
                 [&](const LinearMeanField& l) {
                   if (l.A.rows() != d || l.A.cols() != d || l.B.rows() != d || l.B.cols() != d)
                     throw InvalidArgument("linear_mean_field: A and B must be d x d");
                 },
                 [&](const CustomDrift& c) {
                   if (!c.locally_bounded)
                     throw InvalidArgument("custom drift '" + c.name +
                                           "' is not locally bounded; supply a finite cap");
                   if (!c.fn) throw InvalidArgument("custom drift '" + c.name + "' has no function");
                 },
             },
             drift);
  if (const auto* c = std::get_if<ConstantDiffusion>(&diffusion))
    if (c->sigma.rows() != d) throw InvalidArgument("diffusion: sigma must have d rows");
  if (const auto* s = std::get_if<ScalarDiffusion>(&diffusion))
    if (!std::isfinite(s->s)) throw InvalidArgument("diffusion: scale must be finite");

  constexpr int kSamples = 64;
  std::vector<Vec> states;
  for (int i = 0; i < kSamples; ++i) {
    CounterRng rng(seed, StreamTag::kTest, static_cast<std::uint64_t>(i), 0x5EED);
    states.push_back(geometry::sample_closure(domain, rng, 5.0));
  }
  const auto probe = EmpiricalMeasure::from_points(states);
  for (const auto& x : states) {
    const Vec b = mean_field_drift(*this, x, probe, 0.0);
    if (!b.all_finite()) throw InvalidArgument("drift is not finite at a sampled state");
    const Mat s = sigma(x, 0.0);
    if (s.rows() != d) throw InvalidArgument("diffusion: sigma must have d rows");
    if (require_nondegenerate) {
      Mat l;
      if (!cholesky(gram(s), l))
        throw InvalidArgument("diffusion: sigma sigma^T is not positive definite at a sampled state");
    }
  }
}

CustomDrift make_custom_drift(const std::string& name, const Params& params, int dim) {
  if (name == "constant") {
    const Vec v = param_vec(params, "value", dim, 0.0);
    return {name, [v](const Vec&, double) { return v; }, true};
  }
  if (name == "ou") {
    const double theta = param(params, "theta", 1.0);
    const Vec c = param_vec(params, "center", dim, 0.0);
    return {name, [theta, c](const Vec& x, double) { return -theta * (x - c); }, true};
  }
  if (name == "sign") {
    const double scale = param(params, "scale", 1.0);
    return {name,
            [scale](const Vec& x, double) {
              Vec b(x.dim());
              for (int i = 0; i < x.dim(); ++i) b[i] = -scale * sgn(x[i]);
              return b;
            },
            true};
  }
  if (name == "inverse_power") {
    const double scale = param(params, "scale", 1.0);
    const double alpha = param(params, "alpha", 0.5);
    const double cap = param(params, "cap", INFINITY);
    return {name,
            [scale, alpha, cap](const Vec& x, double) {
              Vec b(x.dim());
              for (int i = 0; i < x.dim(); ++i) {
                const double a = std::abs(x[i]);
                const double mag = a > 0.0 ? std::min(std::pow(a, -alpha), cap) : cap;
                b[i] = -scale * sgn(x[i]) * (std::isfinite(mag) ? mag : 0.0);
              }
              return b;
            },
            std::isfinite(cap)};
  }
  throw InvalidArgument("unknown custom drift '" + name + "'");
}

StateDependentDiffusion make_state_dependent_diffusion(const std::string& name,
                                                       const Params& params, int dim) {
  if (name == "modulated") {
    const double s = param(params, "s", 1.0);
    const double eps = param(params, "eps", 0.5);
    if (!(std::abs(eps) < 1.0)) throw InvalidArgument("modulated diffusion: |eps| must be < 1");
    return {name,
            [s, eps, dim](const Vec& x, double) {
              return Mat::identity(dim, s * (1.0 + eps * std::sin(x[0])));
            },
            dim};
  }
  throw InvalidArgument("unknown state-dependent diffusion '" + name + "'");
}

Vec mean_field_drift(const CoefficientSpec& coeffs, const Vec& x, const EmpiricalMeasure& mu,
                     double t) {
  if (mu.size() > 0 && mu.dim() != x.dim())
    throw InvalidArgument("mean_field_drift: dimension mismatch");
  Vec b = std::visit(Overloaded{
                         [&](const GranularMedia& g) {
                           Vec out = -g.V.gradient(x);
                           if (g.W.kind == InteractionKernel::Kind::kZero) return out;
                           Vec acc(x.dim());
                           for (std::size_t j = 0; j < mu.size(); ++j)
                             acc += mu.weight(j) * g.W.gradient(x - mu.atom(j));
                           return out - acc;
                         },
                         [&](const LinearMeanField& l) {
                           Vec out = l.A * x;
                           if (!l.B.is_zero()) out += l.B * mu.mean();
                           return out;
                         },
                         [&](const CustomDrift& c) { return c.fn(x, t); },
                     },
                     coeffs.drift);
  if (!b.all_finite()) throw NumericalError("mean_field_drift: non-finite drift");
  return b;
}

DriftField::DriftField(const CoefficientSpec& coeffs, const EmpiricalMeasure* mu, double t)
    : coeffs_(&coeffs), mu_(mu), t_(t) {
  if (const auto* g = std::get_if<GranularMedia>(&coeffs.drift))
    zero_ = g->V.kind == Potential::Kind::kZero && g->W.kind == InteractionKernel::Kind::kZero;
  if (!coeffs.depends_on_measure()) return;
  if (mu == nullptr || mu->size() == 0)
    throw InvalidArgument("DriftField: measure-dependent drift needs a measure");
  if (std::holds_alternative<LinearMeanField>(coeffs.drift)) {
    mean_ = mu->mean();
    path_ = Path::kLinearMean;
    return;
  }
  const auto& g = std::get<GranularMedia>(coeffs.drift);
  const double p = g.W.exponent;
  if (p == 2.0) {
    mean_ = mu->mean();
    path_ = Path::kLinearMean;
    return;
  }
  const double q = p - 1.0;
  const bool integer_q = q >= 0.0 && q == std::floor(q) && q <= kMaxFastDegree;
  if (mu->dim() != 1 || !integer_q) {
    path_ = Path::kDirect;
    return;
  }
  q_ = static_cast<int>(q);
  const std::size_t n = mu->size();
  if (q_ % 2 == 1) {
    // sgn(u)|u|^q = u^q for odd q: a polynomial in x with moment coefficients.
    moments_.assign(q_ + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double zpow = mu->weight(j);
      for (int m = 0; m <= q_; ++m) {
        moments_[m] += zpow;
        zpow *= mu->coords()[j];
      }
    }
    path_ = Path::kOddPolynomial;
    return;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mu->coords()[a] < mu->coords()[b];
  });
  sorted_.resize(n);
  prefix_.assign(static_cast<std::size_t>(q_ + 1) * (n + 1), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double z = mu->coords()[order[k]];
    sorted_[k] = z;
    double zpow = mu->weight(order[k]);
    for (int m = 0; m <= q_; ++m) {
      const std::size_t row = static_cast<std::size_t>(m) * (n + 1);
      prefix_[row + k + 1] = prefix_[row + k] + zpow;
      zpow *= z;
    }
  }
  path_ = Path::kSortedPrefix;
}

Vec DriftField::interaction_gradient(const Vec& x) const {
  const auto& g = std::get<GranularMedia>(coeffs_->drift);
  const double c = g.W.scale * g.W.exponent;
  switch (path_) {
    case Path::kLinearMean:
      return (c) * (x - mean_);
    case Path::kOddPolynomial: {
      // sum_j w_j (x - z_j)^q = sum_m C(q,m) x^{q-m} (-1)^m M_m
      double s = 0.0;
      for (int m = 0; m <= q_; ++m)
        s += binomial(q_, m) * ipow(x[0], q_ - m) * ((m % 2) ? -1.0 : 1.0) * moments_[m];
      return Vec{c * s};
    }
    case Path::kSortedPrefix: {
      const std::size_t n = sorted_.size();
      const auto lo = static_cast<std::size_t>(
          std::lower_bound(sorted_.begin(), sorted_.end(), x[0]) - sorted_.begin());
      const auto hi = static_cast<std::size_t>(
          std::upper_bound(sorted_.begin(), sorted_.end(), x[0]) - sorted_.begin());
      // z < x: +(x - z)^q ; z > x: -(z - x)^q  (q even)
      double left = 0.0, right = 0.0;
      for (int m = 0; m <= q_; ++m) {
        const std::size_t row = static_cast<std::size_t>(m) * (n + 1);
        const double below = prefix_[row + lo];
        const double above = prefix_[row + n] - prefix_[row + hi];
        const double bin = binomial(q_, m);
        left += bin * ipow(x[0], q_ - m) * ((m % 2) ? -1.0 : 1.0) * below;
        right += bin * ipow(-x[0], q_ - m) * above;
      }
      return Vec{c * (left - right)};
    }
    case Path::kDirect: {
      Vec acc(x.dim());
      for (std::size_t j = 0; j < mu_->size(); ++j)
        acc += mu_->weight(j) * g.W.gradient(x - mu_->atom(j));
      return acc;
    }
    case Path::kNone:
      break;
  }
  return Vec(x.dim());
}

Vec DriftField::operator()(const Vec& x) const {
  if (zero_) return Vec(x.dim());
  Vec b = std::visit(Overloaded{
                         [&](const GranularMedia& g) {
                           Vec out = -g.V.gradient(x);
                           if (path_ != Path::kNone) out -= interaction_gradient(x);
                           return out;
                         },
                         [&](const LinearMeanField& l) {
                           Vec out = l.A * x;
                           if (path_ == Path::kLinearMean) out += l.B * mean_;
                           return out;
                         },
                         [&](const CustomDrift& cd) { return cd.fn(x, t_); },
                     },
                     coeffs_->drift);
  if (!b.all_finite()) throw NumericalError("drift evaluated to a non-finite value");
  return b;
}

}  // namespace rsde::sde
