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

#include "rsde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rsde/csv.hpp"
#include "rsde/error.hpp"

namespace rsde::verify {
namespace {

using sde::SimConfig;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::map<std::string, std::string> metadata(const SimConfig& cfg) {
  return {{"N", std::to_string(cfg.N)},
          {"h", format_double(cfg.h)},
          {"T", format_double(cfg.T)},
          {"seed", std::to_string(cfg.seed)}};
}

void check_time_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw InvalidArgument("t_grid must not be empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw InvalidArgument("t_grid entries must be > 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("t_grid must be increasing");
  }
}

// Runs the interacting system up to max(t_grid) and keeps the law at each
// grid time. Grid times must be simulation times.
std::vector<EmpiricalMeasure> capture_at(SimConfig cfg, const std::vector<double>& t_grid,
                                          EmpiricalMeasure* initial = nullptr) {
  check_time_grid(t_grid);
  cfg.T = t_grid.back();
  cfg.h = std::min(cfg.h, cfg.T);
  const auto grid = cfg.grid();
  cfg.snapshot_stride = static_cast<std::size_t>(grid.steps);
  std::vector<EmpiricalMeasure> out(t_grid.size());
  std::vector<bool> hit(t_grid.size(), false);
  std::size_t next = 0;
  auto result = sde::simulate_mckean(cfg, [&](const sde::ParticleEnsemble& ens) {
    while (next < t_grid.size() && std::abs(ens.time - t_grid[next]) <= 1e-9 * std::max(1.0, t_grid[next])) {
      out[next] = ens.measure();
      hit[next] = true;
      ++next;
    }
  });
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (!hit[i]) throw InvalidArgument("t_grid point " + format_double(t_grid[i]) +
                                       " is not on the simulation grid");
  if (initial != nullptr) *initial = result.flow.snapshots.front();
  return out;
}

EmpiricalMeasure subsample(const EmpiricalMeasure& mu, std::span<const std::size_t> idx) {
  const auto d = static_cast<std::size_t>(mu.dim());
  std::vector<double> coords;
  coords.reserve(idx.size() * d);
  for (auto i : idx)
    for (std::size_t c = 0; c < d; ++c) coords.push_back(mu.coords()[i * d + c]);
  return EmpiricalMeasure(mu.dim(), std::move(coords));
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
  return v[k];
}

}  // namespace

void VerificationReport::write_csv(const std::string& path) const {
  CsvWriter w(path, {"check", "label", "x", "estimate", "lo", "hi", "reference"});
  for (const auto& r : rows)
    w.field(check).field(r.label).field(r.x).field(r.estimate).field(r.lo).field(r.hi).field(r.reference).end_row();
  w.field(check).field("summary").field(tolerance).field(estimate).field(ci_lo).field(ci_hi).field(pass ? 1.0 : 0.0).end_row();
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  os << check << ": " << (pass ? "PASS" : "FAIL") << " estimate=" << format_double(estimate) << " ci=["
     << format_double(ci_lo) << ", " << format_double(ci_hi) << "] tolerance=" << format_double(tolerance)
     << " rule: " << rule;
  if (!detail.empty()) os << " (" << detail << ")";
  return os.str();
}

VerificationReport check_moment_bound(const SimConfig& cfg, double k, const std::vector<Vec>& starts,
                                      double tolerance) {
  if (!(k >= 1.0)) throw InvalidArgument("check_moment_bound: k must be >= 1");
  if (starts.empty()) throw InvalidArgument("check_moment_bound: no start points");
  VerificationReport rep;
  rep.check = "moment_bound";
  rep.tolerance = tolerance;
  rep.rule = "max ratio <= tolerance * min ratio";
  rep.metadata = metadata(cfg);
  double max_ratio = -kInf, min_ratio = kInf;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    SimConfig c = cfg;
    c.initial = sde::DiracInit{starts[s]};
    c.snapshot_stride = static_cast<std::size_t>(c.grid().steps);
    const auto res = sde::simulate_mckean(c);
    std::vector<double> samples(res.stats.sup_abs.size());
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = std::pow(res.stats.sup_abs[i], k);
    const Estimate e = bootstrap_mean(samples, cfg.seed + s);
    const double scale = 1.0 + std::pow(norm(starts[s]), k);
    const double ratio = e.value / scale;
    rep.rows.push_back({"ratio", norm(starts[s]), ratio, e.lo / scale, e.hi / scale, e.value});
    if (ratio > max_ratio) {
      max_ratio = ratio;
      rep.ci_lo = e.lo / scale;
      rep.ci_hi = e.hi / scale;
    }
    min_ratio = std::min(min_ratio, ratio);
  }
  rep.estimate = max_ratio;
  const double spread = max_ratio == 0.0 ? 1.0 : (min_ratio > 0.0 ? max_ratio / min_ratio : kInf);
  rep.pass = std::isfinite(max_ratio) && spread <= tolerance;
  rep.detail = "spread=" + format_double(spread);
  return rep;
}

VerificationReport check_local_time_moments(const SimConfig& cfg, const std::vector<double>& ks,
                                            double tolerance) {
  if (ks.empty()) throw InvalidArgument("check_local_time_moments: no exponents");
  const auto& domain = cfg.domain;
  const bool flat = std::holds_alternative<geometry::Interval>(domain.shape()) ||
                    std::holds_alternative<geometry::HalfSpace>(domain.shape());
  if (!domain.bounded() && !flat && domain.tilde_boundary().name.empty())
    throw InvalidArgument("check_local_time_moments: needs a bounded domain or a boundary subset");
  VerificationReport rep;
  rep.check = "local_time_moments";
  rep.tolerance = tolerance;
  rep.rule = "finite and estimate(h) / estimate(h/2) within [1/tolerance, tolerance]";
  rep.metadata = metadata(cfg);

  SimConfig c1 = cfg, c2 = cfg;
  c1.snapshot_stride = static_cast<std::size_t>(c1.grid().steps);
  c2.h = cfg.h / 2.0;
  c2.snapshot_stride = static_cast<std::size_t>(c2.grid().steps);
  const auto l1 = sde::simulate_mckean(c1).stats.tilde_local_time;
  const auto l2 = sde::simulate_mckean(c2).stats.tilde_local_time;

  bool ok = true;
  double worst = 1.0;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    std::vector<double> a(l1.size()), b(l2.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::exp(ks[j] * l1[i]);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::exp(ks[j] * l2[i]);
    const Estimate ea = bootstrap_mean(a, cfg.seed + j);
    const double eb = mean_of(b);
    rep.rows.push_back({"exp_moment", ks[j], ea.value, ea.lo, ea.hi, eb});
    if (!std::isfinite(ea.value) || !std::isfinite(eb)) {
      ok = false;
      rep.detail = "overflow; l~_T quantiles 50%=" + format_double(quantile(l1, 0.5)) + " 99%=" +
                   format_double(quantile(l1, 0.99)) + " max=" + format_double(quantile(l1, 1.0));
      worst = kInf;
      continue;
    }
    const double r = ea.value / eb;
    const double dev = std::max(r, 1.0 / r);
    if (dev >= worst) {
      worst = dev;
      rep.ci_lo = ea.lo / eb;
      rep.ci_hi = ea.hi / eb;
      rep.estimate = r;
    }
    if (dev > tolerance) ok = false;
  }
  if (rep.rows.size() == ks.size() && worst == 1.0) {
    rep.estimate = 1.0;
    rep.ci_lo = std::min(rep.ci_lo, 1.0);
    rep.ci_hi = std::max(rep.ci_hi, 1.0);
  }
  rep.ci_lo = std::min(rep.ci_lo, rep.estimate);
  rep.ci_hi = std::max(rep.ci_hi, rep.estimate);
  rep.pass = ok;
  return rep;
}

VerificationReport check_w2_contraction(const SimConfig& cfg, const sde::InitialLaw& mu0,
                                        const sde::InitialLaw& nu0, const std::vector<double>& t_grid,
                                        bool require_monotone) {
  SimConfig cm = cfg, cn = cfg;
  cm.initial = mu0;
  cn.initial = nu0;
  EmpiricalMeasure m0, n0;
  const auto mus = capture_at(cm, t_grid, &m0);
  const auto nus = capture_at(cn, t_grid, &n0);
  const double w0 = measures::wasserstein_k(2.0, m0, n0);

  VerificationReport rep;
  rep.check = "w2_contraction";
  rep.rule = require_monotone ? "finite ratios, nonincreasing in t" : "finite ratios";
  rep.metadata = metadata(cfg);
  rep.metadata["w2_initial"] = format_double(w0);

  bool ok = true;
  double prev = kInf, worst = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double w = measures::wasserstein_k(2.0, mus[i], nus[i]);
    Estimate e{0.0, 0.0, 0.0};
    if (w0 > 0.0) {
      e = bootstrap(
          mus[i].size(),
          [&](std::span<const std::size_t> idx) {
            return measures::wasserstein_k(2.0, subsample(mus[i], idx), subsample(nus[i], idx)) / w0;
          },
          cfg.seed + i);
      e.value = w / w0;
      e.lo = std::min(e.lo, e.value);
      e.hi = std::max(e.hi, e.value);
    }
    rep.rows.push_back({"ratio", t_grid[i], e.value, e.lo, e.hi, w});
    if (!std::isfinite(e.value)) ok = false;
    if (require_monotone && e.value > prev + 1e-12) ok = false;
    prev = e.value;
    if (e.value >= worst) {
      worst = e.value;
      rep.estimate = e.value;
      rep.ci_lo = e.lo;
      rep.ci_hi = e.hi;
    }
  }
  rep.tolerance = worst * worst;  // fitted C
  rep.detail = "fitted C=" + format_double(worst * worst);
  rep.pass = ok;
  return rep;
}

VerificationReport check_log_harnack(const SimConfig& cfg, const sde::InitialLaw& mu0,
                                     const sde::InitialLaw& nu0, const std::vector<double>& t_grid,
                                     const LogHarnackOptions& options) {
  const int d = cfg.domain.dim();
  if (d > 2) throw InvalidArgument("check_log_harnack: dimension must be <= 2");
  if (t_grid.size() < 3) throw InvalidArgument("check_log_harnack: need >= 3 grid points");
  if (t_grid.back() < 10.0 * t_grid.front() * (1.0 - 1e-12))
    throw InvalidArgument("check_log_harnack: t_grid must span a decade");
  if (!cfg.domain.bounded()) throw InvalidArgument("check_log_harnack: needs a bounded domain");
  SimConfig cm = cfg, cn = cfg;
  cm.initial = mu0;
  cn.initial = nu0;
  const auto mus = capture_at(cm, t_grid);
  const auto nus = capture_at(cn, t_grid);

  measures::Binning bin;
  bin.dim = d;
  const auto [lo, hi] = cfg.domain.bounding_box();
  for (int a = 0; a < d; ++a) {
    bin.lower[a] = lo[a];
    bin.upper[a] = hi[a];
    bin.bins[a] = options.bins;
  }
  const std::size_t nb = bin.total_bins();

  VerificationReport rep;
  rep.check = "log_harnack";
  rep.tolerance = options.slope_max - options.slope_min;
  rep.rule = "slope of log Ent vs log t in [" + format_double(options.slope_min) + ", " +
             format_double(options.slope_max) + "] and Pinsker at every point";
  rep.metadata = metadata(cfg);
  rep.metadata["bins"] = std::to_string(options.bins);

  // Bin index per particle per time, for cheap resampling.
  std::vector<std::vector<std::size_t>> bm(t_grid.size()), bn(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    for (std::size_t p = 0; p < mus[i].size(); ++p) bm[i].push_back(bin.locate(mus[i].atom_span(p)));
    for (std::size_t p = 0; p < nus[i].size(); ++p) bn[i].push_back(bin.locate(nus[i].atom_span(p)));
  }
  auto entropy_at = [&](std::size_t i, std::span<const std::size_t> idx, double* var) {
    std::vector<double> pm(nb, 0.0), pn(nb, 0.0);
    const double w = 1.0 / static_cast<double>(idx.size());
    for (auto p : idx) {
      pm[bm[i][p]] += w;
      pn[bn[i][p]] += w;
    }
    const measures::Histogram hm(bin, pm), hn(bin, pn);
    if (var != nullptr) *var = measures::var_norm(hn, hm);
    return measures::relative_entropy(hn, hm);
  };

  const std::size_t n = std::min(mus[0].size(), nus[0].size());
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> logt, loge;
  bool pinsker = true, finite = true;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    double var = 0.0;
    const double ent = entropy_at(i, all, &var);
    const double lhs = 0.5 * var * var;
    if (!(lhs <= ent * (1.0 + 1e-12) + 1e-15)) pinsker = false;
    if (!std::isfinite(ent) || !(ent > 0.0)) {
      finite = false;
    } else {
      logt.push_back(std::log(t_grid[i]));
      loge.push_back(std::log(ent));
    }
    rep.rows.push_back({"entropy", t_grid[i], ent, ent, ent, lhs});
  }
  if (!finite) {
    rep.pass = false;
    rep.estimate = std::numeric_limits<double>::quiet_NaN();
    rep.detail = "infinite or zero entropy at some grid point; increase N or the bin width";
    return rep;
  }
  const double slope = ols_slope(logt, loge);
  const Estimate e = bootstrap(
      n,
      [&](std::span<const std::size_t> idx) {
        std::vector<double> ly;
        for (std::size_t i = 0; i < t_grid.size(); ++i) ly.push_back(std::log(entropy_at(i, idx, nullptr)));
        return ols_slope(logt, ly);
      },
      cfg.seed);
  rep.estimate = slope;
  rep.ci_lo = std::min(e.lo, slope);
  rep.ci_hi = std::max(e.hi, slope);
  rep.pass = pinsker && slope >= options.slope_min && slope <= options.slope_max;
  rep.detail = std::string("pinsker ") + (pinsker ? "holds" : "violated");
  return rep;
}

VerificationReport check_gradient_estimate(const SimConfig& cfg,
                                           const std::function<double(const Vec&)>& f,
                                           const EmpiricalMeasure& nu0, const Vec& direction,
                                           const std::vector<double>& t_grid,
                                           const GradientOptions& options) {
  if (!(options.epsilon > 0.0)) throw InvalidArgument("check_gradient_estimate: epsilon must be > 0");
  if (!(norm(direction) > 0.0)) throw InvalidArgument("check_gradient_estimate: zero direction");
  auto run_from = [&](const EmpiricalMeasure& init) {
    SimConfig c = cfg;
    c.initial = sde::AtomsInit{init};
    EmpiricalMeasure start;
    auto laws = capture_at(c, t_grid, &start);
    return std::make_pair(std::move(start), std::move(laws));
  };
  const auto base = run_from(nu0);
  const auto full = run_from(nu0.translated(options.epsilon * direction));
  const auto half = run_from(nu0.translated(0.5 * options.epsilon * direction));
  const double w_full = measures::wasserstein_k(2.0, full.first, base.first);
  const double w_half = measures::wasserstein_k(2.0, half.first, base.first);
  if (!(w_full > 0.0) || !(w_half > 0.0))
    throw InvalidArgument("check_gradient_estimate: W2 between perturbed and base law is zero");

  double sup_f = 0.0;
  auto expect = [&](const EmpiricalMeasure& mu) {
    double s = 0.0;
    for (std::size_t p = 0; p < mu.size(); ++p) {
      const double v = f(mu.atom(p));
      sup_f = std::max(sup_f, std::abs(v));
      s += mu.weight(p) * v;
    }
    return s;
  };

  VerificationReport rep;
  rep.check = "gradient_estimate";
  rep.tolerance = options.spread_tolerance;
  rep.rule = "ratio*sqrt(t)/|f|_inf within tolerance across t and eps-stable";
  rep.metadata = metadata(cfg);
  std::vector<double> ratios, ratios_half;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double pb = expect(base.second[i]);
    ratios.push_back(std::abs(expect(full.second[i]) - pb) / w_full);
    ratios_half.push_back(std::abs(expect(half.second[i]) - pb) / w_half);
  }
  bool ok = true;
  double lo = kInf, hi = 0.0, worst_eps = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double normalised = sup_f > 0.0 ? ratios[i] * std::sqrt(t_grid[i]) / sup_f : 0.0;
    lo = std::min(lo, normalised);
    hi = std::max(hi, normalised);
    const double scale = std::max(ratios[i], ratios_half[i]);
    const double rel = scale > 1e-12 ? std::abs(ratios[i] - ratios_half[i]) / scale : 0.0;
    worst_eps = std::max(worst_eps, rel);
    if (rel > options.epsilon_tolerance) ok = false;
    rep.rows.push_back({"normalised_ratio", t_grid[i], normalised, normalised, normalised, ratios_half[i]});
  }
  const bool trivial = hi <= 1e-12;
  if (!trivial && (!(lo > 0.0) || hi / lo > options.spread_tolerance)) ok = false;
  rep.estimate = hi;
  rep.ci_lo = lo;
  rep.ci_hi = hi;
  rep.pass = ok;
  rep.detail = "spread=" + format_double(trivial ? 1.0 : hi / lo) + " eps_rel=" + format_double(worst_eps);
  return rep;
}

Estimate occupation_integral(const SimConfig& cfg, const std::function<double(const Vec&)>& f) {
  SimConfig c = cfg;
  const auto grid = c.grid();
  c.snapshot_stride = static_cast<std::size_t>(grid.steps);
  const auto init = sde::sample_initial(c);
  std::vector<double> acc(init.size(), 0.0);
  for (std::size_t p = 0; p < init.size(); ++p) acc[p] = f(init.position(p)) * grid.dt(0);
  sde::simulate_mckean(c, [&](const sde::ParticleEnsemble& ens) {
    if (ens.step >= grid.steps) return;
    const double dt = grid.dt(ens.step);
    for (std::size_t p = 0; p < ens.size(); ++p) acc[p] += f(ens.position(p)) * dt;
  });
  return bootstrap_mean(acc, cfg.seed);
}

VerificationReport check_interior_cone(const geometry::Domain& domain, double r0, std::size_t samples,
                                       std::uint64_t seed) {
  const auto cert = geometry::certify_interior_cone(domain, samples, r0, seed);
  VerificationReport rep;
  rep.check = "interior_cone";
  rep.estimate = rep.ci_lo = rep.ci_hi = cert.worst_interior_cone;
  rep.tolerance = geometry::kGeoEps;
  rep.rule = "worst <y-x, n(x)> + |y-x|^2/(2 r0) >= -tolerance over sampled pairs";
  rep.pass = cert.pass;
  rep.metadata = {{"pairs", std::to_string(cert.pairs)}, {"r0", format_double(r0)},
                  {"seed", std::to_string(seed)}, {"domain", domain.kind_name()}};
  if (cert.convex_checked) rep.detail = "worst convex=" + format_double(cert.worst_convex);
  return rep;
}

VerificationReport check_psi_class(const measures::PsiFunction& psi) {
  const auto r = measures::psi_class_check(psi);
  VerificationReport rep;
  rep.check = "psi_class";
  rep.estimate = rep.ci_lo = rep.ci_hi = r.worst_growth_excess;
  rep.tolerance = 0.0;
  rep.rule = "psi(0)=0, psi'>0, psi' bounded, r psi' + r^2 psi''^+ <= kappa psi on the grid";
  rep.pass = r.pass;
  rep.metadata = {{"psi", psi.name}, {"grid_points", std::to_string(r.grid_points)}};
  rep.detail = "max psi'=" + format_double(r.max_derivative);
  return rep;
}

}  // namespace rsde::verify
