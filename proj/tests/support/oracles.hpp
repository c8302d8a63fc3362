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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace rsde::testing {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Two-sided Kolmogorov-Smirnov statistic of a sample against a continuous cdf.
inline double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// E exp(k |Z|) for Z ~ N(0, t), closed form.
inline double levy_exp_moment(double k, double t) {
  return 2.0 * std::exp(k * k * t / 2.0) * normal_cdf(k * std::sqrt(t));
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// W_k between equal-size uniform 1D samples via the sorted coupling, k >= 1.
inline double sorted_wk(std::vector<double> a, std::vector<double> b, double k) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), k);
  return std::pow(s / static_cast<double>(a.size()), 1.0 / k);
}

// Folding of y into [lo, hi] by reflection (tent map with period 2(hi - lo)).
inline double tent_fold(double y, double lo, double hi) {
  const double len = hi - lo;
  double r = std::fmod(y - lo, 2.0 * len);
  if (r < 0.0) r += 2.0 * len;
  return lo + (r > len ? 2.0 * len - r : r);
}

// Neumann heat kernel on [lo, hi] for generator a d^2/dx^2 by the method of
// images (independent of the cosine series).
inline double images_heat_kernel(double x, double y, double t, double a, double lo, double hi,
                                 int images = 60) {
  const double len = hi - lo;
  const double var = 2.0 * a * t;
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
  double s = 0.0;
  for (int n = -images; n <= images; ++n) {
    const double shift = 2.0 * n * len;
    const double d1 = x - y - shift;
    const double d2 = x + y - 2.0 * lo - shift;
    s += std::exp(-d1 * d1 / (2.0 * var)) + std::exp(-d2 * d2 / (2.0 * var));
  }
  return c * s;
}

}  // namespace rsde::testing
