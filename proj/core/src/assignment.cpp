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

#include "rsde/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsde/error.hpp"

namespace rsde::transport {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

AssignmentResult solve_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw InvalidArgument("solve_assignment: cost matrix must be n x n");
  for (double c : cost)
    if (!std::isfinite(c)) throw InvalidArgument("solve_assignment: non-finite cost");

  AssignmentResult res;
  if (n == 0) return res;
  const std::size_t none = n;  // sentinel column / "unmatched" marker
  std::vector<double> u(n, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, none);  // match[j] = row owning column j
  std::vector<std::size_t> way(n + 1, none);
  std::vector<char> used(n + 1);

  for (std::size_t row = 0; row < n; ++row) {
    match[none] = row;
    std::size_t j0 = none;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      const double* crow = cost.data() + i0 * n;
      double delta = kInf;
      std::size_t j1 = none;
      for (std::size_t j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double reduced = crow[j] - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != none);
    // Flip the augmenting path.
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != none);
  }

  res.row_to_col.assign(n, none);
  for (std::size_t j = 0; j < n; ++j) res.row_to_col[match[j]] = j;
  for (std::size_t i = 0; i < n; ++i) res.cost += cost[i * n + res.row_to_col[i]];
  res.row_dual = u;
  res.col_dual.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
  return res;
}

TransportResult solve_transport(std::span<const double> cost, std::span<const double> supply,
                                std::span<const double> demand) {
  const std::size_t m = supply.size(), n = demand.size();
  if (m == 0 || n == 0) throw InvalidArgument("solve_transport: empty marginal");
  if (cost.size() != m * n) throw InvalidArgument("solve_transport: cost matrix must be m x n");
  double total_a = 0.0, total_b = 0.0;
  for (double a : supply) {
    if (!(a >= 0.0)) throw InvalidArgument("solve_transport: negative supply");
    total_a += a;
  }
  for (double b : demand) {
    if (!(b >= 0.0)) throw InvalidArgument("solve_transport: negative demand");
    total_b += b;
  }
  if (std::abs(total_a - total_b) > 1e-9 * std::max(total_a, 1.0))
    throw InvalidArgument("solve_transport: marginals have different mass");
  for (double c : cost)
    if (!std::isfinite(c)) throw InvalidArgument("solve_transport: non-finite cost");

  const double eps = 1e-15 * std::max(total_a, 1.0);
  std::vector<double> rem_a(supply.begin(), supply.end());
  std::vector<double> rem_b(demand.begin(), demand.end());
  std::vector<double> flow(m * n, 0.0);
  // Potentials: node u in [0, m) sources, [m, m+n) sinks. Reduced cost of
  // arc i->j is c_ij + pi_i - pi_j >= 0.
  std::vector<double> pi(m + n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double best = kInf;
    for (std::size_t i = 0; i < m; ++i) best = std::min(best, cost[i * n + j]);
    pi[m + j] = best;
  }

  std::vector<double> dist(m + n);
  std::vector<std::size_t> parent(m + n);
  std::vector<char> done(m + n);
  const std::size_t none = m + n;
  std::size_t guard = 0;
  const std::size_t max_augment = 8 * (m + n) * (m + n) + 64;

  auto remaining = [&] {
    double s = 0.0;
    for (double a : rem_a) s += a;
    return s;
  };

  while (remaining() > eps * static_cast<double>(m)) {
    if (++guard > max_augment) throw NumericalError("solve_transport: augmentation limit exceeded");
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), none);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < m; ++i)
      if (rem_a[i] > eps) dist[i] = 0.0;

    std::size_t target = none;
    while (true) {
      std::size_t u = none;
      double best = kInf;
      for (std::size_t k = 0; k < m + n; ++k)
        if (!done[k] && dist[k] < best) {
          best = dist[k];
          u = k;
        }
      if (u == none) break;
      done[u] = 1;
      if (u >= m && rem_b[u - m] > eps) {
        target = u;
        break;
      }
      if (u < m) {
        const double* crow = cost.data() + u * n;
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t w = m + j;
          if (done[w]) continue;
          const double nd = dist[u] + std::max(0.0, crow[j] + pi[u] - pi[w]);
          if (nd < dist[w]) {
            dist[w] = nd;
            parent[w] = u;
          }
        }
      } else {
        const std::size_t j = u - m;
        for (std::size_t i = 0; i < m; ++i) {
          if (done[i] || flow[i * n + j] <= eps) continue;
          const double nd = dist[u] + std::max(0.0, -cost[i * n + j] + pi[u] - pi[i]);
          if (nd < dist[i]) {
            dist[i] = nd;
            parent[i] = u;
          }
        }
      }
    }
    if (target == none) throw NumericalError("solve_transport: no augmenting path (infeasible)");

    const double dt = dist[target];
    for (std::size_t k = 0; k < m + n; ++k) pi[k] += std::min(dist[k], dt);

    // Bottleneck along the path back to a source with remaining supply.
    double push = rem_b[target - m];
    std::size_t k = target;
    while (parent[k] != none) {
      const std::size_t p = parent[k];
      if (p >= m) push = std::min(push, flow[k * n + (p - m)]);  // backward arc sink p -> source k
      k = p;
    }
    push = std::min(push, rem_a[k]);

    rem_a[k] -= push;
    rem_b[target - m] -= push;
    k = target;
    while (parent[k] != none) {
      const std::size_t p = parent[k];
      if (p < m) flow[p * n + (k - m)] += push;
      else flow[k * n + (p - m)] -= push;
      k = p;
    }
  }

  TransportResult res;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double f = flow[i * n + j];
      if (f > eps) {
        res.plan.push_back({i, j, f});
        res.cost += f * cost[i * n + j];
      }
    }
  res.source_dual.resize(m);
  res.sink_dual.resize(n);
  for (std::size_t i = 0; i < m; ++i) res.source_dual[i] = -pi[i];
  for (std::size_t j = 0; j < n; ++j) res.sink_dual[j] = pi[m + j];
  return res;
}

}  // namespace rsde::transport
