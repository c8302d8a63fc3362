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

#include <algorithm>
#include <cmath>

#include "rsde/measures.hpp"

namespace rsde::measures {

std::size_t Binning::locate(std::span<const double> x) const {
  std::size_t flat = 0, stride = 1;
  for (int a = 0; a < dim; ++a) {
    const double t = (x[a] - lower[a]) / (upper[a] - lower[a]) * static_cast<double>(bins[a]);
    auto idx = static_cast<long long>(std::floor(t));
    idx = std::clamp<long long>(idx, 0, static_cast<long long>(bins[a]) - 1);
    flat += static_cast<std::size_t>(idx) * stride;
    stride *= bins[a];
  }
  return flat;
}

Binning freedman_diaconis_binning(const std::vector<const EmpiricalMeasure*>& samples,
                                  std::array<double, 2> lower, std::array<double, 2> upper,
                                  std::size_t max_bins) {
  if (samples.empty()) throw InvalidArgument("freedman_diaconis_binning: no samples");
  const int dim = samples.front()->dim();
  if (dim > 2) throw InvalidArgument("histograms support d <= 2 only");
  Binning b;
  b.dim = dim;
  b.lower = lower;
  b.upper = upper;
  for (int a = 0; a < dim; ++a) {
    if (!(upper[a] > lower[a]) || !std::isfinite(upper[a] - lower[a]))
      throw InvalidArgument("freedman_diaconis_binning: bounds must be finite and ordered");
    std::vector<double> xs;
    for (const auto* m : samples) {
      if (m->dim() != dim) throw InvalidArgument("freedman_diaconis_binning: mixed dimensions");
      for (std::size_t i = 0; i < m->size(); ++i) xs.push_back(m->atom_span(i)[a]);
    }
    const std::size_t n = xs.size();
    auto q = [&](double p) {
      auto it = xs.begin() + static_cast<std::ptrdiff_t>(p * static_cast<double>(n - 1));
      std::nth_element(xs.begin(), it, xs.end());
      return *it;
    };
    const double iqr = q(0.75) - q(0.25);
    std::size_t count;
    if (iqr > 0.0) {
      const double width = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(n));
      count = static_cast<std::size_t>(std::ceil((upper[a] - lower[a]) / width));
    } else {
      count = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    }
    b.bins[a] = std::clamp<std::size_t>(count, 1, max_bins);
  }
  return b;
}

Histogram::Histogram(Binning binning, std::vector<double> probabilities)
    : binning_(binning), probs_(std::move(probabilities)) {
  if (binning_.dim < 1 || binning_.dim > 2) throw InvalidArgument("histograms support d <= 2 only");
  if (probs_.size() != binning_.total_bins())
    throw InvalidArgument("Histogram: probability count does not match binning");
}

Histogram Histogram::of(const EmpiricalMeasure& mu, const Binning& binning) {
  if (mu.dim() != binning.dim) throw InvalidArgument("Histogram::of: dimension mismatch");
  std::vector<double> p(binning.total_bins(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) p[binning.locate(mu.atom_span(i))] += mu.weight(i);
  return Histogram(binning, std::move(p));
}

double relative_entropy(const Histogram& nu, const Histogram& mu) {
  if (!(nu.binning() == mu.binning())) throw InvalidArgument("relative_entropy: binning mismatch");
  double s = 0.0;
  const auto& p = nu.probabilities();
  const auto& q = mu.probabilities();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return INFINITY;
    s += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(s, 0.0);
}

double var_norm(const Histogram& nu, const Histogram& mu) {
  if (!(nu.binning() == mu.binning())) throw InvalidArgument("var_norm: binning mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < nu.probabilities().size(); ++i)
    s += std::abs(nu.probabilities()[i] - mu.probabilities()[i]);
  return s;
}

}  // namespace rsde::measures
