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

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rsde/vec.hpp"

namespace rsde::measures {

// Finitely supported probability measure: atoms in R^d with weights.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  // Uniform weights 1/N; coords is atom-major (N x dim).
  EmpiricalMeasure(int dim, std::vector<double> coords);
  EmpiricalMeasure(int dim, std::vector<double> coords, std::vector<double> weights);

  static EmpiricalMeasure dirac(const Vec& x);
  static EmpiricalMeasure from_points(const std::vector<Vec>& points);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool uniform() const { return uniform_; }
  Vec atom(std::size_t i) const { return Vec::from_span(atom_span(i)); }
  std::span<const double> atom_span(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<double>& weights() const { return weights_; }

  Vec mean() const;
  // Same atoms translated by `shift`.
  EmpiricalMeasure translated(const Vec& shift) const;

 private:
  int dim_ = 1;
  std::vector<double> coords_;
  std::vector<double> weights_;
  bool uniform_ = true;
};

// Transport cost profile psi on [0, inf) with its first two derivatives.
struct PsiFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  double kappa = 1.0;

  static PsiFunction identity(double kappa = 1.0);
  // r^k
  static PsiFunction power(double k, double kappa = 1.0);
  // 1 - exp(-r)
  static PsiFunction bounded_exp(double kappa = 1.0);
  // log(1 + r)
  static PsiFunction log1p(double kappa = 1.0);
};

// L^k Wasserstein distance (W_psi with psi = r^k, then the 1/max(1,k) root).
// k = 0 gives half the total variation on the merged support. 1D with k >= 1
// uses the monotone (quantile) coupling; equal-size uniform measures use an
// exact assignment (N <= 2048); any other pair uses the exact transport LP
// (sizes <= 256).
double wasserstein_k(double k, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Optimal transport cost under c(x, y) = psi(|x - y|); no outer root.
double wasserstein_psi(const PsiFunction& psi, const EmpiricalMeasure& mu,
                       const EmpiricalMeasure& nu);

// sup_{|f| <= 1 + |.|^k} |mu(f) - nu(f)|, exact on the merged support.
double weighted_var_norm(double k, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// sup_{|f| <= 1} |mu(f) - nu(f)| = sum over merged atoms of |mu(z) - nu(z)|.
double var_norm(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// (sum w |x|^k)^{1/k}; 1 when k = 0.
double moment_norm(double k, const EmpiricalMeasure& mu);

struct PsiClassReport {
  bool pass = false;
  bool zero_at_origin = false;
  bool increasing = false;
  bool bounded_derivative = false;
  bool growth_condition = false;
  // max over the grid of r psi'(r) + r^2 psi''(r)^+ - kappa psi(r)
  double worst_growth_excess = 0.0;
  double max_derivative = 0.0;
  std::size_t grid_points = 0;
};

// Grid check of psi(0) = 0, psi' > 0, bounded psi', and
// r psi' + r^2 (psi'')^+ <= kappa psi on a log-spaced grid of (0, r_max].
// Boundedness is probed three decades beyond both ends of the grid.
PsiClassReport psi_class_check(const PsiFunction& psi, std::size_t grid_points = 2000,
                               double r_min = 1e-6, double r_max = 1e3);

// Regular tensor-product binning over a box, d in {1, 2}.
struct Binning {
  int dim = 1;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 1.0};
  std::array<std::size_t, 2> bins{1, 1};

  std::size_t total_bins() const { return dim == 1 ? bins[0] : bins[0] * bins[1]; }
  double bin_width(int axis) const {
    return (upper[axis] - lower[axis]) / static_cast<double>(bins[axis]);
  }
  // Index of the bin containing x; points outside are clamped to edge bins.
  std::size_t locate(std::span<const double> x) const;
  friend bool operator==(const Binning&, const Binning&) = default;
};

// Freedman-Diaconis bin count per axis over [lower, upper], computed from
// the pooled samples; clamped to [1, max_bins].
Binning freedman_diaconis_binning(const std::vector<const EmpiricalMeasure*>& samples,
                                  std::array<double, 2> lower, std::array<double, 2> upper,
                                  std::size_t max_bins = 512);

class Histogram {
 public:
  Histogram(Binning binning, std::vector<double> probabilities);
  static Histogram of(const EmpiricalMeasure& mu, const Binning& binning);

  const Binning& binning() const { return binning_; }
  const std::vector<double>& probabilities() const { return probs_; }

 private:
  Binning binning_;
  std::vector<double> probs_;
};

// Ent(nu | mu) = sum nu_i log(nu_i / mu_i), 0 log 0 = 0; +inf when some
// mu_i = 0 < nu_i. Throws on binning mismatch.
double relative_entropy(const Histogram& nu, const Histogram& mu);

// sum |nu_i - mu_i|.
double var_norm(const Histogram& nu, const Histogram& mu);

// CSV: one atom per row, columns x1..xd, weight.
void write_measure_csv(const std::string& path, const EmpiricalMeasure& mu);
EmpiricalMeasure read_measure_csv(const std::string& path);

}  // namespace rsde::measures
