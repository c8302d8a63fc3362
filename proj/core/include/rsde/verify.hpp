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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rsde/geometry.hpp"
#include "rsde/measures.hpp"
#include "rsde/sde.hpp"

namespace rsde::verify {

using measures::EmpiricalMeasure;

struct Estimate {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr std::size_t kBootstrapResamples = 200;

// Percentile bootstrap (95%) of stat over index resamples of [0, n).
// The interval is widened if needed so that it contains the point estimate.
Estimate bootstrap(std::size_t n, const std::function<double(std::span<const std::size_t>)>& stat,
                   std::uint64_t seed, std::size_t resamples = kBootstrapResamples);

Estimate bootstrap_mean(std::span<const double> samples, std::uint64_t seed,
                        std::size_t resamples = kBootstrapResamples);

struct ReportRow {
  std::string label;
  double x = 0.0;
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double reference = 0.0;
};

struct VerificationReport {
  std::string check;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string rule;
  std::string detail;
  std::vector<ReportRow> rows;
  std::map<std::string, std::string> metadata;

  void write_csv(const std::string& path) const;
  std::string summary() const;
};

// E sup_t |X_t|^k from each start point; estimate is c = max ratio
// E sup|X|^k / (1 + |x|^k); passes iff max ratio <= tolerance * min ratio.
VerificationReport check_moment_bound(const sde::SimConfig& cfg, double k,
                                      const std::vector<Vec>& starts, double tolerance = 2.0);

// E exp(k l~_T) for each k at h and h/2; passes iff every estimate is
// finite and the ratio of the two lies within [1/tolerance, tolerance].
VerificationReport check_local_time_moments(const sde::SimConfig& cfg, const std::vector<double>& ks,
                                            double tolerance = 1.5);

// W2(mu_t, nu_t) / W2(mu_0, nu_0) on t_grid under common random numbers.
// Passes iff all ratios are finite and, when require_monotone, nonincreasing.
VerificationReport check_w2_contraction(const sde::SimConfig& cfg, const sde::InitialLaw& mu0,
                                        const sde::InitialLaw& nu0, const std::vector<double>& t_grid,
                                        bool require_monotone);

struct LogHarnackOptions {
  std::size_t bins = 64;
  double slope_min = -1.6;
  double slope_max = -0.4;
};

// Histogram entropy Ent(nu_t | mu_t) on t_grid. Passes iff the OLS slope of
// log Ent against log t lies in [slope_min, slope_max] and Pinsker holds at
// every grid point.
VerificationReport check_log_harnack(const sde::SimConfig& cfg, const sde::InitialLaw& mu0,
                                     const sde::InitialLaw& nu0, const std::vector<double>& t_grid,
                                     const LogHarnackOptions& options = {});

struct GradientOptions {
  double epsilon = 0.05;
  double spread_tolerance = 2.0;
  double epsilon_tolerance = 0.2;
};

// |P_t f(nu^eps) - P_t f(nu)| / W2(nu^eps, nu) for nu^eps = nu translated by
// eps * direction. Passes iff ratio * sqrt(t) / |f|_inf stays within
// spread_tolerance across t_grid and the ratios at eps and eps / 2 agree to
// epsilon_tolerance (relative).
VerificationReport check_gradient_estimate(const sde::SimConfig& cfg,
                                           const std::function<double(const Vec&)>& f,
                                           const EmpiricalMeasure& nu0, const Vec& direction,
                                           const std::vector<double>& t_grid,
                                           const GradientOptions& options = {});

// E int_0^T f(X_s) ds by left-point quadrature on the simulation grid.
Estimate occupation_integral(const sde::SimConfig& cfg, const std::function<double(const Vec&)>& f);

VerificationReport check_interior_cone(const geometry::Domain& domain, double r0,
                                       std::size_t samples, std::uint64_t seed);

VerificationReport check_psi_class(const measures::PsiFunction& psi);

// Least-squares slope of y against x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace rsde::verify
