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

#include "rsde/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rsde/error.hpp"

namespace rsde::pde {
namespace {

constexpr double kNegativityTol = 1e-12;
constexpr double kCfl = 0.4;
constexpr double kPositivityFraction = 0.9;
constexpr double kNeumannTol = 1e-8;

double diffusivity_of(const sde::CoefficientSpec& coeffs, int dim) {
  const auto a = coeffs.isotropic_diffusivity(dim);
  if (!a) throw InvalidArgument("pde: diffusion must be a constant multiple of the identity");
  return *a;
}

struct FaceVelocities {
  std::vector<double> vx;  // (nx + 1) * ny, index i + (nx + 1) * j
  std::vector<double> vy;  // nx * (ny + 1), index i + nx * j
  double max_abs = 0.0;
};

FaceVelocities face_velocities(const DensityGrid& g, const sde::CoefficientSpec& coeffs) {
  std::optional<EmpiricalMeasure> mu;
  if (coeffs.depends_on_measure()) mu = g.as_measure();
  const sde::DriftField drift(coeffs, mu ? &*mu : nullptr, g.time);
  FaceVelocities f;
  const std::size_t nx = g.cells[0];
  if (g.dim == 1) {
    f.vx.assign(nx + 1, 0.0);
    for (std::size_t i = 1; i < nx; ++i) {
      f.vx[i] = drift(Vec{g.lower[0] + static_cast<double>(i) * g.width(0)})[0];
      f.max_abs = std::max(f.max_abs, std::abs(f.vx[i]) / g.width(0));
    }
    return f;
  }
  const std::size_t ny = g.cells[1];
  f.vx.assign((nx + 1) * ny, 0.0);
  f.vy.assign(nx * (ny + 1), 0.0);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 1; i < nx; ++i) {
      const double v = drift(Vec{g.lower[0] + static_cast<double>(i) * g.width(0), g.center(1, j)})[0];
      f.vx[i + (nx + 1) * j] = v;
    }
  for (std::size_t j = 1; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = drift(Vec{g.center(0, i), g.lower[1] + static_cast<double>(j) * g.width(1)})[1];
      f.vy[i + nx * j] = v;
    }
  double mx = 0.0, my = 0.0;
  for (double v : f.vx) mx = std::max(mx, std::abs(v));
  for (double v : f.vy) my = std::max(my, std::abs(v));
  f.max_abs = mx / g.width(0) + my / g.width(1);
  return f;
}

double upwind(double v, double left, double right) { return v > 0.0 ? v * left : v * right; }

double step_limit(const DensityGrid& g, const sde::CoefficientSpec& coeffs) {
  const double a = diffusivity_of(coeffs, g.dim);
  double limit = diffusive_step_limit(g, a);
  const auto f = face_velocities(g, coeffs);
  // Worst-case outflow rate of a cell: both faces diffusive plus both faces upwind.
  double s = 0.0;
  for (int k = 0; k < g.dim; ++k) s += 1.0 / (g.width(k) * g.width(k));
  const double rate = 2.0 * a * s + 2.0 * f.max_abs;
  if (rate > 0.0) limit = std::min(limit, kPositivityFraction / rate);
  return limit;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

DensityGrid DensityGrid::interval(double lower, double upper, std::size_t cells) {
  if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper))
    throw InvalidArgument("DensityGrid: need a finite interval with lower < upper");
  if (cells < 1) throw InvalidArgument("DensityGrid: need >= 1 cell");
  DensityGrid g;
  g.dim = 1;
  g.lower = {lower, 0.0};
  g.upper = {upper, 1.0};
  g.cells = {cells, 1};
  g.density.assign(cells, 1.0 / (upper - lower));
  return g;
}

DensityGrid DensityGrid::box(std::array<double, 2> lower, std::array<double, 2> upper,
                             std::array<std::size_t, 2> cells) {
  for (int a = 0; a < 2; ++a) {
    if (!(upper[a] > lower[a]) || !std::isfinite(lower[a]) || !std::isfinite(upper[a]))
      throw InvalidArgument("DensityGrid: need a finite box with lower < upper");
    if (cells[a] < 1) throw InvalidArgument("DensityGrid: need >= 1 cell per axis");
  }
  DensityGrid g;
  g.dim = 2;
  g.lower = lower;
  g.upper = upper;
  g.cells = cells;
  g.density.assign(cells[0] * cells[1], 1.0 / ((upper[0] - lower[0]) * (upper[1] - lower[1])));
  return g;
}

Vec DensityGrid::cell_center(std::size_t flat) const {
  if (dim == 1) return Vec{center(0, flat)};
  return Vec{center(0, flat % cells[0]), center(1, flat / cells[0])};
}

double DensityGrid::mass() const {
  double s = 0.0;
  for (double v : density) s += v;
  return s * cell_volume();
}

measures::Binning DensityGrid::binning() const {
  measures::Binning b;
  b.dim = dim;
  b.lower = lower;
  b.upper = upper;
  b.bins = cells;
  return b;
}

EmpiricalMeasure DensityGrid::as_measure() const {
  std::vector<double> coords, weights(size());
  coords.reserve(size() * static_cast<std::size_t>(dim));
  double total = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    const Vec c = cell_center(k);
    for (int a = 0; a < dim; ++a) coords.push_back(c[a]);
    weights[k] = std::max(density[k], 0.0);
    total += weights[k];
  }
  if (!(total > 0.0)) throw NumericalError("DensityGrid: no mass");
  for (auto& w : weights) w /= total;
  // Renormalise once more so the weights sum to one to rounding.
  double s = 0.0;
  for (double w : weights) s += w;
  for (auto& w : weights) w /= s;
  return EmpiricalMeasure(dim, std::move(coords), std::move(weights));
}

double diffusive_step_limit(const DensityGrid& grid, double diffusivity) {
  if (!(diffusivity > 0.0)) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (int a = 0; a < grid.dim; ++a) s += 1.0 / (grid.width(a) * grid.width(a));
  return kCfl / (diffusivity * s);
}

DensityGrid fp_step(const DensityGrid& grid, const sde::CoefficientSpec& coeffs, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("fp_step: dt must be > 0");
  if (grid.density.size() != grid.size()) throw InvalidArgument("fp_step: density size mismatch");
  const double a = diffusivity_of(coeffs, grid.dim);
  if (dt > diffusive_step_limit(grid, a) * (1.0 + 1e-12))
    throw InvalidArgument("fp_step: CFL condition violated (dt > 0.4 dx^2 / a)");
  const auto fv = face_velocities(grid, coeffs);
  const auto& rho = grid.density;
  DensityGrid next = grid;
  auto& out = next.density;
  const std::size_t nx = grid.cells[0];
  const double dx = grid.width(0);
  if (grid.dim == 1) {
    std::vector<double> flux(nx + 1, 0.0);
    for (std::size_t i = 1; i < nx; ++i)
      flux[i] = upwind(fv.vx[i], rho[i - 1], rho[i]) - a * (rho[i] - rho[i - 1]) / dx;
    for (std::size_t i = 0; i < nx; ++i) out[i] = rho[i] - dt / dx * (flux[i + 1] - flux[i]);
  } else {
    const std::size_t ny = grid.cells[1];
    const double dy = grid.width(1);
    std::vector<double> fx((nx + 1) * ny, 0.0), fy(nx * (ny + 1), 0.0);
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 1; i < nx; ++i) {
        const double l = rho[(i - 1) + nx * j], r = rho[i + nx * j];
        fx[i + (nx + 1) * j] = upwind(fv.vx[i + (nx + 1) * j], l, r) - a * (r - l) / dx;
      }
    for (std::size_t j = 1; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        const double l = rho[i + nx * (j - 1)], r = rho[i + nx * j];
        fy[i + nx * j] = upwind(fv.vy[i + nx * j], l, r) - a * (r - l) / dy;
      }
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i)
        out[i + nx * j] = rho[i + nx * j] -
                          dt / dx * (fx[(i + 1) + (nx + 1) * j] - fx[i + (nx + 1) * j]) -
                          dt / dy * (fy[i + nx * (j + 1)] - fy[i + nx * j]);
  }
  for (double v : out)
    if (!(v >= -kNegativityTol)) throw NumericalError("fp_step: density became negative");
  next.time = grid.time + dt;
  return next;
}

Trajectory solve(const DensityGrid& initial, const sde::CoefficientSpec& coeffs,
                 const SolveOptions& options) {
  if (options.snapshot_times.empty()) throw InvalidArgument("pde solve: no snapshot times");
  Trajectory traj;
  traj.snapshots.push_back(initial);
  DensityGrid cur = initial;
  const double m0 = initial.mass();
  double t = initial.time;
  for (double target : options.snapshot_times) {
    if (!(target > t)) throw InvalidArgument("pde solve: snapshot times must increase");
    while (t < target) {
      double limit = step_limit(cur, coeffs);
      if (options.max_dt > 0.0) limit = std::min(limit, options.max_dt);
      const double gap = target - t;
      const auto n = std::max<double>(1.0, std::ceil(gap / limit));
      const bool last = n <= 1.0;
      const double dt = last ? gap : gap / n;
      const double before = cur.mass();
      cur = fp_step(cur, coeffs, dt);
      const double after = cur.mass();
      traj.max_step_mass_defect = std::max(traj.max_step_mass_defect, std::abs(after - before));
      traj.max_mass_defect = std::max(traj.max_mass_defect, std::abs(after - m0));
      ++traj.steps;
      if (last) break;
      t = cur.time;
      if (options.record_all) traj.snapshots.push_back(cur);
    }
    cur.time = target;
    t = target;
    traj.snapshots.push_back(cur);
  }
  return traj;
}

DensityGrid initial_density(const sde::InitialLaw& law, DensityGrid grid) {
  const double vol = grid.cell_volume();
  std::fill(grid.density.begin(), grid.density.end(), 0.0);
  grid.time = 0.0;
  std::visit(
      [&](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, sde::DiracInit>) {
          grid.density[grid.binning().locate(l.point.span())] = 1.0 / vol;
        } else if constexpr (std::is_same_v<L, sde::AtomsInit>) {
          const auto h = measures::Histogram::of(l.atoms, grid.binning());
          for (std::size_t k = 0; k < grid.size(); ++k) grid.density[k] = h.probabilities()[k] / vol;
        } else if constexpr (std::is_same_v<L, sde::UniformInit>) {
          std::fill(grid.density.begin(), grid.density.end(), 1.0 / (vol * static_cast<double>(grid.size())));
        } else {
          auto cell_mass = [&](int axis, std::size_t i) {
            const double lo = grid.lower[axis] + static_cast<double>(i) * grid.width(axis);
            const double hi = lo + grid.width(axis);
            return normal_cdf((hi - l.mean[axis]) / l.sd) - normal_cdf((lo - l.mean[axis]) / l.sd);
          };
          if (l.mean.dim() != grid.dim) throw InvalidArgument("initial_density: dimension mismatch");
          double total = 0.0;
          for (std::size_t k = 0; k < grid.size(); ++k) {
            double m = cell_mass(0, k % grid.cells[0]);
            if (grid.dim == 2) m *= cell_mass(1, k / grid.cells[0]);
            grid.density[k] = m;
            total += m;
          }
          if (!(total > 0.0)) throw InvalidArgument("initial_density: gaussian has no mass on the grid");
          for (auto& v : grid.density) v /= total * vol;
        }
      },
      law);
  return grid;
}

TestFunction TestFunction::constant(double c) {
  return {"constant", [c](const Vec&) { return c; }, [](const Vec& x) { return Vec(x.dim()); },
          [](const Vec&) { return 0.0; }};
}

TestFunction TestFunction::cosine(int mode, double lower, double upper, int axis, int dim) {
  const double k = mode * std::numbers::pi / (upper - lower);
  return {"cos" + std::to_string(mode),
          [=](const Vec& x) { return std::cos(k * (x[axis] - lower)); },
          [=](const Vec& x) {
            Vec g(dim);
            g[axis] = -k * std::sin(k * (x[axis] - lower));
            return g;
          },
          [=](const Vec& x) { return -k * k * std::cos(k * (x[axis] - lower)); }};
}

TestFunction TestFunction::neumann_cubic(double lower, double upper, double scale) {
  // f' = scale (x - lower)(x - upper)
  return {"neumann_cubic",
          [=](const Vec& x) {
            const double u = x[0];
            return scale * (u * u * u / 3.0 - 0.5 * (lower + upper) * u * u + lower * upper * u);
          },
          [=](const Vec& x) { return Vec{scale * (x[0] - lower) * (x[0] - upper)}; },
          [=](const Vec& x) { return scale * (2.0 * x[0] - lower - upper); }};
}

TestFunction TestFunction::sum(std::vector<std::pair<double, TestFunction>> terms) {
  auto shared = std::make_shared<std::vector<std::pair<double, TestFunction>>>(std::move(terms));
  return {"mix",
          [shared](const Vec& x) {
            double s = 0.0;
            for (const auto& [c, f] : *shared) s += c * f.value(x);
            return s;
          },
          [shared](const Vec& x) {
            Vec g(x.dim());
            for (const auto& [c, f] : *shared) g += c * f.gradient(x);
            return g;
          },
          [shared](const Vec& x) {
            double s = 0.0;
            for (const auto& [c, f] : *shared) s += c * f.laplacian(x);
            return s;
          }};
}

std::vector<WeakFormResidual> weak_form_residual(const Trajectory& trajectory,
                                                 const sde::CoefficientSpec& coeffs,
                                                 const std::vector<TestFunction>& tests) {
  if (trajectory.snapshots.size() < 2) throw InvalidArgument("weak_form_residual: need >= 2 snapshots");
  const auto& g0 = trajectory.snapshots.front();
  const double a = diffusivity_of(coeffs, g0.dim);

  // Neumann compatibility on the boundary.
  for (const auto& f : tests) {
    auto check = [&](const Vec& x, int axis) {
      if (std::abs(f.gradient(x)[axis]) > kNeumannTol)
        throw InvalidArgument("weak_form_residual: test function '" + f.name +
                              "' violates the Neumann condition");
    };
    if (g0.dim == 1) {
      check(Vec{g0.lower[0]}, 0);
      check(Vec{g0.upper[0]}, 0);
    } else {
      constexpr int kProbe = 64;
      for (int k = 0; k <= kProbe; ++k) {
        const double s = static_cast<double>(k) / kProbe;
        const double x = g0.lower[0] + s * (g0.upper[0] - g0.lower[0]);
        const double y = g0.lower[1] + s * (g0.upper[1] - g0.lower[1]);
        check(Vec{g0.lower[0], y}, 0);
        check(Vec{g0.upper[0], y}, 0);
        check(Vec{x, g0.lower[1]}, 1);
        check(Vec{x, g0.upper[1]}, 1);
      }
    }
  }

  const std::size_t ns = trajectory.snapshots.size();
  std::vector<std::vector<double>> generator(tests.size(), std::vector<double>(ns, 0.0));
  std::vector<double> first(tests.size(), 0.0), last(tests.size(), 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& g = trajectory.snapshots[s];
    std::optional<EmpiricalMeasure> mu;
    if (coeffs.depends_on_measure()) mu = g.as_measure();
    const sde::DriftField drift(coeffs, mu ? &*mu : nullptr, g.time);
    const double vol = g.cell_volume();
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec x = g.cell_center(k);
      const Vec b = drift(x);
      const double m = g.density[k] * vol;
      for (std::size_t f = 0; f < tests.size(); ++f) {
        generator[f][s] += m * (dot(b, tests[f].gradient(x)) + a * tests[f].laplacian(x));
        if (s == 0) first[f] += m * tests[f].value(x);
        if (s + 1 == ns) last[f] += m * tests[f].value(x);
      }
    }
  }
  std::vector<WeakFormResidual> out;
  for (std::size_t f = 0; f < tests.size(); ++f) {
    double integral = 0.0;
    for (std::size_t s = 0; s + 1 < ns; ++s) {
      const double dt = trajectory.snapshots[s + 1].time - trajectory.snapshots[s].time;
      integral += 0.5 * dt * (generator[f][s] + generator[f][s + 1]);
    }
    WeakFormResidual r;
    r.name = tests[f].name;
    r.lhs = last[f] - first[f];
    r.rhs = integral;
    r.residual = std::abs(r.lhs - r.rhs);
    out.push_back(r);
  }
  return out;
}

std::vector<L1Row> compare_particle_pde(const sde::MeasureFlow& flow, const Trajectory& trajectory) {
  if (trajectory.snapshots.empty()) throw InvalidArgument("compare_particle_pde: empty trajectory");
  std::vector<L1Row> rows;
  for (const auto& g : trajectory.snapshots) {
    auto it = std::find_if(flow.times.begin(), flow.times.end(),
                           [&](double t) { return std::abs(t - g.time) <= 1e-9 * std::max(1.0, g.time); });
    if (it == flow.times.end())
      throw InvalidArgument("compare_particle_pde: PDE time " + std::to_string(g.time) +
                            " has no particle snapshot");
    const auto& mu = flow.snapshots[static_cast<std::size_t>(it - flow.times.begin())];
    if (mu.dim() != g.dim) throw InvalidArgument("compare_particle_pde: dimension mismatch");
    for (std::size_t p = 0; p < mu.size(); ++p)
      for (int a = 0; a < g.dim; ++a) {
        const double v = mu.coords()[p * static_cast<std::size_t>(g.dim) + a];
        const double tol = 1e-9 * std::max(1.0, std::abs(v));
        if (v < g.lower[a] - tol || v > g.upper[a] + tol)
          throw InvalidArgument("compare_particle_pde: particles lie outside the PDE grid");
      }
    const auto h = measures::Histogram::of(mu, g.binning());
    const double vol = g.cell_volume();
    double l1 = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) l1 += std::abs(h.probabilities()[k] - g.density[k] * vol);
    rows.push_back({g.time, l1, g.mass()});
  }
  return rows;
}

double neumann_heat_kernel(double x, double y, double t, double a, double lower, double upper, int terms) {
  const double L = upper - lower;
  double s = 1.0 / L;
  for (int n = 1; n <= terms; ++n) {
    const double k = n * std::numbers::pi / L;
    const double decay = std::exp(-a * k * k * t);
    if (decay < 1e-300) break;
    s += 2.0 / L * std::cos(k * (x - lower)) * std::cos(k * (y - lower)) * decay;
  }
  return s;
}

}  // namespace rsde::pde
