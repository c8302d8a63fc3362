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
#include <numeric>

#include "rsde/error.hpp"
#include "rsde/rng.hpp"
#include "rsde/verify.hpp"

namespace rsde::verify {

Estimate bootstrap(std::size_t n, const std::function<double(std::span<const std::size_t>)>& stat,
                   std::uint64_t seed, std::size_t resamples) {
  if (n == 0) throw InvalidArgument("bootstrap: no samples");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Estimate est;
  est.value = stat(idx);
  std::vector<double> values;
  values.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    CounterRng rng(seed, StreamTag::kBootstrap, r, 0);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    const double v = stat(idx);
    if (std::isfinite(v)) values.push_back(v);
  }
  if (values.empty()) {
    est.lo = est.hi = est.value;
    return est;
  }
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  est.lo = std::min(quantile(0.025), est.value);
  est.hi = std::max(quantile(0.975), est.value);
  return est;
}

Estimate bootstrap_mean(std::span<const double> samples, std::uint64_t seed, std::size_t resamples) {
  return bootstrap(
      samples.size(),
      [&](std::span<const std::size_t> idx) {
        double s = 0.0;
        for (auto i : idx) s += samples[i];
        return s / static_cast<double>(idx.size());
      },
      seed, resamples);
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("ols_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("ols_slope: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace rsde::verify
