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

#include "rsde/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "rsde/assignment.hpp"
#include "rsde/csv.hpp"

namespace rsde::measures {
namespace {

constexpr std::size_t kMaxAssignmentSize = 2048;
constexpr std::size_t kMaxLpSize = 256;

void check_pair(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) throw InvalidArgument("measures have different dimensions");
  if (mu.size() == 0 || nu.size() == 0) throw InvalidArgument("empty measure");
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Optimal cost of the monotone coupling of two 1D measures under c(|x-y|).
template <class Cost>
double monotone_coupling_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, Cost c) {
  auto order = [](const EmpiricalMeasure& m) {
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return m.coords()[a] < m.coords()[b]; });
    return idx;
  };
  const auto ia = order(mu), ib = order(nu);
  if (mu.uniform() && nu.uniform() && mu.size() == nu.size()) {
    double s = 0.0;
    for (std::size_t r = 0; r < ia.size(); ++r)
      s += c(std::abs(mu.coords()[ia[r]] - nu.coords()[ib[r]]));
    return s / static_cast<double>(ia.size());
  }
  double s = 0.0;
  std::size_t i = 0, j = 0;
  double ra = mu.weight(ia[0]), rb = nu.weight(ib[0]);
  while (i < ia.size() && j < ib.size()) {
    const double take = std::min(ra, rb);
    s += take * c(std::abs(mu.coords()[ia[i]] - nu.coords()[ib[j]]));
    if (ra <= rb) {
      rb -= ra;
      if (++i < ia.size()) ra = mu.weight(ia[i]);
      if (rb <= 0.0 && ++j < ib.size()) rb = nu.weight(ib[j]);
    } else {
      ra -= rb;
      if (++j < ib.size()) rb = nu.weight(ib[j]);
    }
  }
  return s;
}

template <class Cost>
double exact_transport_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, Cost c) {
  const std::size_t m = mu.size(), n = nu.size();
  if (m == 1 || n == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        s += mu.weight(i) * nu.weight(j) * c(distance(mu.atom_span(i), nu.atom_span(j)));
    return s;
  }
  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = c(distance(mu.atom_span(i), nu.atom_span(j)));
  if (mu.uniform() && nu.uniform() && m == n) {
    if (m > kMaxAssignmentSize)
      throw InvalidArgument("exact transport: assignment path limited to N <= 2048");
    return transport::solve_assignment(cost, m).cost / static_cast<double>(m);
  }
  if (m > kMaxLpSize || n > kMaxLpSize)
    throw InvalidArgument("exact transport: weighted LP path limited to N <= 256");
  return transport::solve_transport(cost, mu.weights(), nu.weights()).cost;
}

struct MergedMass {
  double mu = 0.0;
  double nu = 0.0;
};

std::map<std::vector<double>, MergedMass> merge_support(const EmpiricalMeasure& mu,
                                                        const EmpiricalMeasure& nu) {
  std::map<std::vector<double>, MergedMass> merged;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto s = mu.atom_span(i);
    merged[std::vector<double>(s.begin(), s.end())].mu += mu.weight(i);
  }
  for (std::size_t i = 0; i < nu.size(); ++i) {
    auto s = nu.atom_span(i);
    merged[std::vector<double>(s.begin(), s.end())].nu += nu.weight(i);
  }
  return merged;
}

double power_cost(double r, double k) { return k == 1.0 ? r : (k == 2.0 ? r * r : std::pow(r, k)); }

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(int dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("EmpiricalMeasure: bad dimension");
  if (coords_.size() % static_cast<std::size_t>(dim) != 0)
    throw InvalidArgument("EmpiricalMeasure: coordinate count not a multiple of dim");
  const std::size_t n = coords_.size() / static_cast<std::size_t>(dim);
  weights_.assign(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  uniform_ = true;
  for (double c : coords_)
    if (!std::isfinite(c)) throw InvalidArgument("EmpiricalMeasure: non-finite atom");
}

EmpiricalMeasure::EmpiricalMeasure(int dim, std::vector<double> coords, std::vector<double> weights)
    : EmpiricalMeasure(dim, std::move(coords)) {
  if (weights.size() != weights_.size())
    throw InvalidArgument("EmpiricalMeasure: weight count does not match atom count");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("EmpiricalMeasure: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("EmpiricalMeasure: weights must sum to 1");
  uniform_ = std::all_of(weights.begin(), weights.end(),
                         [&](double w) { return w == weights.front(); });
  weights_ = std::move(weights);
}

EmpiricalMeasure EmpiricalMeasure::dirac(const Vec& x) {
  return EmpiricalMeasure(x.dim(), std::vector<double>(x.begin(), x.end()));
}

EmpiricalMeasure EmpiricalMeasure::from_points(const std::vector<Vec>& points) {
  if (points.empty()) throw InvalidArgument("from_points: empty");
  std::vector<double> coords;
  coords.reserve(points.size() * static_cast<std::size_t>(points[0].dim()));
  for (const auto& p : points) {
    if (p.dim() != points[0].dim()) throw InvalidArgument("from_points: mixed dimensions");
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return EmpiricalMeasure(points[0].dim(), std::move(coords));
}

Vec EmpiricalMeasure::mean() const {
  Vec m(dim_);
  for (std::size_t i = 0; i < size(); ++i)
    for (int k = 0; k < dim_; ++k) m[k] += weights_[i] * coords_[i * dim_ + k];
  return m;
}

EmpiricalMeasure EmpiricalMeasure::translated(const Vec& shift) const {
  if (shift.dim() != dim_) throw InvalidArgument("translated: dimension mismatch");
  EmpiricalMeasure out = *this;
  for (std::size_t i = 0; i < size(); ++i)
    for (int k = 0; k < dim_; ++k) out.coords_[i * dim_ + k] += shift[k];
  return out;
}

PsiFunction PsiFunction::identity(double kappa) {
  return {"identity", [](double r) { return r; }, [](double) { return 1.0; },
          [](double) { return 0.0; }, kappa};
}

PsiFunction PsiFunction::power(double k, double kappa) {
  if (!(k > 0.0)) throw InvalidArgument("psi power: exponent must be positive");
  return {"power",
          [k](double r) { return std::pow(r, k); },
          [k](double r) { return k * std::pow(r, k - 1.0); },
          [k](double r) { return k * (k - 1.0) * std::pow(r, k - 2.0); },
          kappa};
}

PsiFunction PsiFunction::bounded_exp(double kappa) {
  return {"bounded_exp", [](double r) { return -std::expm1(-r); },
          [](double r) { return std::exp(-r); }, [](double r) { return -std::exp(-r); }, kappa};
}

PsiFunction PsiFunction::log1p(double kappa) {
  return {"log1p", [](double r) { return std::log1p(r); },
          [](double r) { return 1.0 / (1.0 + r); },
          [](double r) { return -1.0 / ((1.0 + r) * (1.0 + r)); }, kappa};
}

namespace {
// Solvers see the pair in a fixed order so that W(mu, nu) == W(nu, mu) exactly.
bool canonical_before(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.coords() != b.coords()) return a.coords() < b.coords();
  return a.weights() < b.weights();
}
}  // namespace

double wasserstein_k(double k, const EmpiricalMeasure& mu_in, const EmpiricalMeasure& nu_in) {
  if (!(k >= 0.0)) throw InvalidArgument("wasserstein_k: k must be >= 0");
  check_pair(mu_in, nu_in);
  const bool swap = canonical_before(nu_in, mu_in);
  const auto& mu = swap ? nu_in : mu_in;
  const auto& nu = swap ? mu_in : nu_in;
  if (k == 0.0) return 0.5 * var_norm(mu, nu);
  auto cost = [k](double r) { return power_cost(r, k); };
  double c;
  if (mu.dim() == 1 && k >= 1.0) {
    c = monotone_coupling_cost(mu, nu, cost);
  } else {
    c = exact_transport_cost(mu, nu, cost);
  }
  c = std::max(c, 0.0);
  if (k == 1.0 || k < 1.0) return c;
  return k == 2.0 ? std::sqrt(c) : std::pow(c, 1.0 / k);
}

double wasserstein_psi(const PsiFunction& psi, const EmpiricalMeasure& mu_in,
                       const EmpiricalMeasure& nu_in) {
  check_pair(mu_in, nu_in);
  const bool swap = canonical_before(nu_in, mu_in);
  const auto& mu = swap ? nu_in : mu_in;
  const auto& nu = swap ? mu_in : nu_in;
  return std::max(0.0, exact_transport_cost(mu, nu, psi.value));
}

double weighted_var_norm(double k, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (!(k > 0.0)) throw InvalidArgument("weighted_var_norm: k must be > 0");
  check_pair(mu, nu);
  double s = 0.0;
  for (const auto& [z, m] : merge_support(mu, nu)) {
    double r2 = 0.0;
    for (double c : z) r2 += c * c;
    s += std::abs(m.mu - m.nu) * (1.0 + std::pow(std::sqrt(r2), k));
  }
  return s;
}

double var_norm(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  check_pair(mu, nu);
  double s = 0.0;
  for (const auto& [z, m] : merge_support(mu, nu)) s += std::abs(m.mu - m.nu);
  return s;
}

double moment_norm(double k, const EmpiricalMeasure& mu) {
  if (!(k >= 0.0)) throw InvalidArgument("moment_norm: k must be >= 0");
  if (k == 0.0) return 1.0;
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double r2 = 0.0;
    for (double c : mu.atom_span(i)) r2 += c * c;
    s += mu.weight(i) * std::pow(std::sqrt(r2), k);
  }
  return std::pow(s, 1.0 / k);
}

PsiClassReport psi_class_check(const PsiFunction& psi, std::size_t grid_points, double r_min,
                               double r_max) {
  if (grid_points < 2 || !(r_min > 0.0) || !(r_max > r_min))
    throw InvalidArgument("psi_class_check: bad grid");
  PsiClassReport rep;
  rep.grid_points = grid_points;
  rep.zero_at_origin = std::abs(psi.value(0.0)) <= 1e-14;
  rep.increasing = true;
  rep.growth_condition = true;
  rep.worst_growth_excess = -INFINITY;
  double max_d1 = 0.0;
  double prev_d1 = INFINITY;
  const double log_lo = std::log(r_min), log_hi = std::log(r_max);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double r = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                           static_cast<double>(grid_points - 1));
    const double p = psi.value(r), d1 = psi.d1(r), d2 = psi.d2(r);
    // A derivative that underflowed after decaying through the subnormals still counts.
    const bool underflow = d1 == 0.0 && prev_d1 < 1e-150;
    if (!(d1 > 0.0) && !underflow) rep.increasing = false;
    prev_d1 = d1;
    if (std::isfinite(d1)) max_d1 = std::max(max_d1, d1);
    else max_d1 = INFINITY;
    const double lhs = r * d1 + r * r * std::max(d2, 0.0);
    const double excess = lhs - psi.kappa * p;
    rep.worst_growth_excess = std::max(rep.worst_growth_excess, excess);
    if (!(lhs <= psi.kappa * p * (1.0 + 1e-12) + 1e-300)) rep.growth_condition = false;
  }
  rep.max_derivative = max_d1;
  rep.bounded_derivative = std::isfinite(max_d1);
  for (int decade = 1; decade <= 3 && rep.bounded_derivative; ++decade) {
    const double scale = std::pow(10.0, decade);
    for (double r : {r_min / scale, r_max * scale}) {
      const double d1 = psi.d1(r);
      if (!std::isfinite(d1) || d1 > max_d1 * (1.0 + 1e-3)) rep.bounded_derivative = false;
    }
  }
  rep.pass = rep.zero_at_origin && rep.increasing && rep.bounded_derivative && rep.growth_condition;
  return rep;
}

void write_measure_csv(const std::string& path, const EmpiricalMeasure& mu) {
  std::vector<std::string> header;
  for (int k = 0; k < mu.dim(); ++k) header.push_back("x" + std::to_string(k + 1));
  header.push_back("weight");
  CsvWriter w(path, header);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (double c : mu.atom_span(i)) w.field(c);
    w.field(mu.weight(i));
    w.end_row();
  }
}

EmpiricalMeasure read_measure_csv(const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw InvalidArgument("read_measure_csv: no atoms in " + path);
  const std::size_t cols = rows.front().size();
  if (cols < 2) throw InvalidArgument("read_measure_csv: need coordinates and weight");
  const int dim = static_cast<int>(cols - 1);
  std::vector<double> coords, weights;
  for (const auto& r : rows) {
    if (r.size() != cols) throw InvalidArgument("read_measure_csv: ragged row in " + path);
    for (int k = 0; k < dim; ++k) coords.push_back(std::stod(r[k]));
    weights.push_back(std::stod(r[cols - 1]));
  }
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return EmpiricalMeasure(dim, std::move(coords), std::move(weights));
}

}  // namespace rsde::measures
