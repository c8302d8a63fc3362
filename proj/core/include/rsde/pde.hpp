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
#include <functional>
#include <string>
#include <vector>

#include "rsde/coefficients.hpp"
#include "rsde/measures.hpp"
#include "rsde/sde.hpp"

namespace rsde::pde {

using measures::EmpiricalMeasure;

// Cell-averaged density on a regular grid over an interval (dim 1) or a
// box (dim 2). Cell (i, j) has flat index i + cells[0] * j.
struct DensityGrid {
  int dim = 1;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 1.0};
  std::array<std::size_t, 2> cells{1, 1};
  std::vector<double> density;
  double time = 0.0;

  static DensityGrid interval(double lower, double upper, std::size_t cells);
  static DensityGrid box(std::array<double, 2> lower, std::array<double, 2> upper,
                         std::array<std::size_t, 2> cells);

  std::size_t size() const { return dim == 1 ? cells[0] : cells[0] * cells[1]; }
  double width(int axis) const { return (upper[axis] - lower[axis]) / static_cast<double>(cells[axis]); }
  double center(int axis, std::size_t i) const {
    return lower[axis] + (static_cast<double>(i) + 0.5) * width(axis);
  }
  Vec cell_center(std::size_t flat) const;
  double cell_volume() const { return dim == 1 ? width(0) : width(0) * width(1); }
  double mass() const;
  measures::Binning binning() const;
  // Atoms at cell centres weighted by cell mass (renormalised).
  EmpiricalMeasure as_measure() const;
};

// Largest step allowed by the diffusive CFL rule dt * a * sum_k 1/dx_k^2 <= 0.4.
double diffusive_step_limit(const DensityGrid& grid, double diffusivity);

// One explicit finite-volume step of d rho/dt = div(a grad rho - b(., rho) rho)
// with upwinded advection, central diffusion and zero total flux through the
// boundary faces. Diffusion must be a constant multiple of the identity.
// Throws on CFL violation or density below -1e-12.
DensityGrid fp_step(const DensityGrid& grid, const sde::CoefficientSpec& coeffs, double dt);

struct SolveOptions {
  std::vector<double> snapshot_times;  // increasing, > 0
  double max_dt = 0.0;                 // 0: automatic
  bool record_all = false;             // keep every step (for weak-form checks)
};

struct Trajectory {
  std::vector<DensityGrid> snapshots;  // starts with the initial grid
  std::size_t steps = 0;
  double max_mass_defect = 0.0;        // max_n |mass_n - mass_0|
  double max_step_mass_defect = 0.0;   // max_n |mass_{n+1} - mass_n|
};

// Integrates to the last snapshot time, landing exactly on every snapshot time.
Trajectory solve(const DensityGrid& initial, const sde::CoefficientSpec& coeffs,
                 const SolveOptions& options);

// Discretises the initial law on the grid (cell averages).
DensityGrid initial_density(const sde::InitialLaw& law, DensityGrid grid);

struct TestFunction {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<double(const Vec&)> laplacian;

  static TestFunction constant(double c = 1.0);
  // cos(m pi (x - lower) / (upper - lower)) along the given axis.
  static TestFunction cosine(int mode, double lower, double upper, int axis = 0, int dim = 1);
  // Cubic with zero slope at both ends of [lower, upper].
  static TestFunction neumann_cubic(double lower, double upper, double scale = 1.0);
  static TestFunction sum(std::vector<std::pair<double, TestFunction>> terms);
};

struct WeakFormResidual {
  std::string name;
  double lhs = 0.0;  // mu_t(f) - mu_0(f)
  double rhs = 0.0;  // int_0^t mu_s(L f) ds
  double residual = 0.0;
};

// |mu_T(f) - mu_0(f) - int mu_s(L_{s,mu_s} f) ds| over the trajectory with
// trapezoidal time quadrature. Throws when a test function has normal
// derivative above 1e-8 on the boundary.
std::vector<WeakFormResidual> weak_form_residual(const Trajectory& trajectory,
                                                 const sde::CoefficientSpec& coeffs,
                                                 const std::vector<TestFunction>& tests);

struct L1Row {
  double time = 0.0;
  double l1 = 0.0;
  double pde_mass = 0.0;
};

// L1 distance between the particle histogram on the PDE grid and the
// density, at every PDE snapshot time. Times must match flow snapshots.
std::vector<L1Row> compare_particle_pde(const sde::MeasureFlow& flow, const Trajectory& trajectory);

// Transition density of Brownian motion with generator a d^2/dx^2 reflected
// on [lower, upper], by cosine series.
double neumann_heat_kernel(double x, double y, double t, double a, double lower, double upper,
                           int terms = 400);

}  // namespace rsde::pde
