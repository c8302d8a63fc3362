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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rsde/geometry.hpp"
#include "rsde/measures.hpp"
#include "rsde/vec.hpp"

namespace rsde::sde {

using measures::EmpiricalMeasure;

// Confinement potential V.
struct Potential {
  enum class Kind { kZero, kQuadratic, kDoubleWell };
  Kind kind = Kind::kZero;
  double scale = 1.0;

  static Potential zero() { return {}; }
  // scale * |x|^2 / 2
  static Potential quadratic(double scale = 1.0) { return {Kind::kQuadratic, scale}; }
  // scale * (|x|^2 - 1)^2 / 4
  static Potential double_well(double scale = 1.0) { return {Kind::kDoubleWell, scale}; }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
};

// Interaction kernel W(u) = scale * |u|^exponent; grad W(0) := 0.
struct InteractionKernel {
  enum class Kind { kZero, kPower };
  Kind kind = Kind::kZero;
  double scale = 1.0;
  double exponent = 2.0;

  static InteractionKernel zero() { return {}; }
  static InteractionKernel power(double exponent, double scale = 1.0) {
    return {Kind::kPower, scale, exponent};
  }

  double value(const Vec& u) const;
  Vec gradient(const Vec& u) const;
};

// b(x, mu) = -grad V(x) - (grad W * mu)(x)
struct GranularMedia {
  Potential V;
  InteractionKernel W;
};

// b(x, mu) = A x + B mean(mu)
struct LinearMeanField {
  Mat A;
  Mat B;
};

// Measure-independent drift from the built-in registry.
struct CustomDrift {
  std::string name;
  std::function<Vec(const Vec&, double)> fn;
  bool locally_bounded = true;
};

using Drift = std::variant<GranularMedia, LinearMeanField, CustomDrift>;

struct ConstantDiffusion {
  Mat sigma;  // d x m
};

// s * Identity
struct ScalarDiffusion {
  double s = 1.0;
};

struct StateDependentDiffusion {
  std::string name;
  std::function<Mat(const Vec&, double)> fn;
  int noise_dim = 1;
};

using Diffusion = std::variant<ConstantDiffusion, ScalarDiffusion, StateDependentDiffusion>;

enum class MeasureMode { kEmpirical, kFrozenFlow };

struct CoefficientSpec {
  Drift drift = GranularMedia{};
  Diffusion diffusion = ScalarDiffusion{1.0};
  MeasureMode measure_mode = MeasureMode::kEmpirical;

  bool depends_on_measure() const;
  int noise_dim(int dim) const;
  Mat sigma(const Vec& x, double t) const;
  // s^2 / 2 when sigma sigma^T = s^2 I is constant; empty otherwise.
  std::optional<double> isotropic_diffusivity(int dim) const;

  // Checks shapes against the domain dimension, finiteness of the drift on
  // sampled states, rejects drifts that are not locally bounded, and (when
  // requested) positive definiteness of sigma sigma^T on sampled states.
  void validate(const geometry::Domain& domain, bool require_nondegenerate,
                std::uint64_t seed = 0) const;
};

using Params = std::map<std::string, std::vector<double>>;

// Registry: "constant" {value}, "ou" {theta, center}, "sign" {scale},
// "inverse_power" {scale, alpha, cap}. inverse_power without a cap is not
// locally bounded and fails validation.
CustomDrift make_custom_drift(const std::string& name, const Params& params, int dim);

// Registry: "modulated" {s, eps}: sigma(x) = s (1 + eps sin x_1) I, |eps| < 1.
StateDependentDiffusion make_state_dependent_diffusion(const std::string& name,
                                                       const Params& params, int dim);

// b_t(x, mu) by direct summation over the atoms of mu, O(N).
Vec mean_field_drift(const CoefficientSpec& coeffs, const Vec& x, const EmpiricalMeasure& mu,
                     double t);

// b_t(., mu) for a fixed measure and time. Precomputes what the drift needs
// from mu (mean, or sorted atoms with power prefix sums for 1D power
// kernels) so that evaluating at all N particles costs O(N log N).
class DriftField {
 public:
  // mu may be null when the drift does not depend on the measure.
  DriftField(const CoefficientSpec& coeffs, const EmpiricalMeasure* mu, double t);

  Vec operator()(const Vec& x) const;

 private:
  Vec interaction_gradient(const Vec& x) const;

  const CoefficientSpec* coeffs_;
  const EmpiricalMeasure* mu_;
  double t_;
  bool zero_ = false;
  Vec mean_;
  enum class Path { kNone, kDirect, kLinearMean, kOddPolynomial, kSortedPrefix } path_ = Path::kNone;
  int q_ = 0;
  std::vector<double> sorted_;
  // prefix_[m * (n + 1) + k] = sum_{j < k} w_j z_j^m over sorted atoms
  std::vector<double> prefix_;
  std::vector<double> moments_;
};

}  // namespace rsde::sde
