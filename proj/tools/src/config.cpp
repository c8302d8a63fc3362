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

#include "rsde/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "rsde/error.hpp"
#include "rsde/sdf.hpp"

namespace rsde::cli {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join(path, key), "is required");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (j.is_null()) return kInf;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ConfigError(path, "must be a number");
  }
  if (!j.is_number()) throw ConfigError(path, "must be a number");
  return j.get<double>();
}

double number_or(const Json& j, const std::string& key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  return number(j.at(key), join(path, key));
}

std::string string_of(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "must be a string");
  return j.get<std::string>();
}

std::uint64_t u64_of(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
    throw ConfigError(path, "must be a non-negative integer");
  return j.get<std::uint64_t>();
}

Mat parse_matrix(const Json& j, int rows, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) throw ConfigError(path, "must be a " + std::to_string(rows) + "-row matrix");
  const auto cols = j.at(0).is_array() ? static_cast<int>(j.at(0).size()) : 0;
  if (cols < 1 || cols > kMaxDim) throw ConfigError(path, "rows must be non-empty arrays");
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != cols) throw ConfigError(path, "rows must have equal length");
    for (int c = 0; c < cols; ++c) m(r, c) = number(row.at(c), path);
  }
  return m;
}

sde::Params parse_params(const Json& j, const std::string& path) {
  sde::Params p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto field = join(path, it.key());
    if (it->is_array()) {
      p[it.key()] = parse_number_list(*it, field);
    } else {
      p[it.key()] = {number(*it, field)};
    }
  }
  return p;
}

geometry::BoundaryPredicate parse_tilde(const Json& j, const geometry::Domain& domain, const std::string& path) {
  const std::string kind = j.is_string() ? j.get<std::string>() : string_of(require(j, "kind", path), join(path, "kind"));
  if (kind == "all") return geometry::BoundaryPredicate::all();
  if (kind == "none") return geometry::BoundaryPredicate::none();
  if (kind == "lower" || kind == "upper") {
    const auto* iv = std::get_if<geometry::Interval>(&domain.shape());
    if (iv == nullptr) throw ConfigError(path, "'" + kind + "' needs an interval domain");
    const double end = kind == "lower" ? iv->lower : iv->upper;
    return {kind, [end](const Vec& x) { return std::abs(x[0] - end) <= 1e-9 * std::max(1.0, std::abs(end)); }};
  }
  if (kind == "halfspace") {
    const Vec n = parse_vec(require(j, "normal", path), domain.dim(), join(path, "normal"));
    const double c = number(require(j, "offset", path), join(path, "offset"));
    return {kind, [n, c](const Vec& x) { return dot(n, x) >= c; }};
  }
  throw ConfigError(join(path, "kind"), "unknown boundary subset '" + kind + "'");
}

}  // namespace

std::vector<double> parse_number_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j.at(i), path + "[" + std::to_string(i) + "]"));
  return out;
}

Vec parse_vec(const Json& j, int dim, const std::string& path) {
  if (j.is_number() && dim == 1) return Vec{j.get<double>()};
  const auto v = parse_number_list(j, path);
  if (dim > 0 && static_cast<int>(v.size()) != dim)
    throw ConfigError(path, "must have " + std::to_string(dim) + " entries");
  if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) throw ConfigError(path, "bad dimension");
  return Vec::from_span(v);
}

geometry::Domain parse_domain(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  const std::string kind = string_of(require(j, "kind", path), join(path, "kind"));
  auto build = [&]() -> geometry::Domain {
    if (kind == "interval") {
      const double lo = j.contains("lower") ? number(j.at("lower"), join(path, "lower")) : 0.0;
      double hi = j.contains("upper") ? number(j.at("upper"), join(path, "upper")) : kInf;
      const double lower = j.contains("lower") && j.at("lower").is_null() ? -kInf : lo;
      return geometry::Domain::interval(lower, hi);
    }
    if (kind == "half_space") {
      const Vec n = parse_vec(require(j, "normal", path), 0, join(path, "normal"));
      return geometry::Domain::half_space(n, number_or(j, "offset", path, 0.0));
    }
    if (kind == "box") {
      const Vec lo = parse_vec(require(j, "lower", path), 0, join(path, "lower"));
      return geometry::Domain::box(lo, parse_vec(require(j, "upper", path), lo.dim(), join(path, "upper")));
    }
    if (kind == "ball") {
      const Vec c = parse_vec(require(j, "center", path), 0, join(path, "center"));
      return geometry::Domain::ball(c, number(require(j, "radius", path), join(path, "radius")));
    }
    if (kind == "annulus") {
      const Vec c = parse_vec(require(j, "center", path), 0, join(path, "center"));
      return geometry::Domain::annulus(c, number(require(j, "inner", path), join(path, "inner")),
                                       number(require(j, "outer", path), join(path, "outer")));
    }
    if (kind == "sdf") {
      const std::string shape = string_of(require(j, "shape", path), join(path, "shape"));
      if (shape == "disc") {
        return geometry::Domain::sdf(geometry::make_disc_sdf(parse_vec(require(j, "center", path), 2, join(path, "center")),
                                                   number(require(j, "radius", path), join(path, "radius"))));
      }
      if (shape == "rounded_box") {
        return geometry::Domain::sdf(geometry::make_rounded_box_sdf(
            parse_vec(require(j, "center", path), 2, join(path, "center")),
            parse_vec(require(j, "half", path), 2, join(path, "half")),
            number(require(j, "radius", path), join(path, "radius"))));
      }
      if (shape == "disc_union") {
        return geometry::Domain::sdf(geometry::make_disc_union_sdf(
            parse_vec(require(j, "center1", path), 2, join(path, "center1")),
            number(require(j, "radius1", path), join(path, "radius1")),
            parse_vec(require(j, "center2", path), 2, join(path, "center2")),
            number(require(j, "radius2", path), join(path, "radius2"))));
      }
      throw ConfigError(join(path, "shape"), "unknown sdf shape '" + shape + "'");
    }
    throw ConfigError(join(path, "kind"), "unknown domain kind '" + kind + "'");
  };
  try {
    geometry::Domain d = build();
    if (j.contains("r0")) d.with_r0(number(j.at("r0"), join(path, "r0")));
    if (j.contains("tilde")) d.with_tilde_boundary(parse_tilde(j.at("tilde"), d, join(path, "tilde")));
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

sde::CoefficientSpec parse_coefficients(const Json& j, int dim, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  sde::CoefficientSpec c;
  try {
    const auto dpath = join(path, "drift");
    const Json& dj = require(j, "drift", path);
    const std::string kind = string_of(require(dj, "kind", dpath), join(dpath, "kind"));
    if (kind == "granular_media") {
      sde::GranularMedia g;
      if (dj.contains("V")) {
        const auto vpath = join(dpath, "V");
        const Json& vj = dj.at("V");
        const std::string vk = string_of(require(vj, "kind", vpath), join(vpath, "kind"));
        const double scale = number_or(vj, "scale", vpath, 1.0);
        if (vk == "zero") g.V = sde::Potential::zero();
        else if (vk == "quadratic") g.V = sde::Potential::quadratic(scale);
        else if (vk == "double_well") g.V = sde::Potential::double_well(scale);
        else throw ConfigError(join(vpath, "kind"), "unknown potential '" + vk + "'");
      }
      if (dj.contains("W")) {
        const auto wpath = join(dpath, "W");
        const Json& wj = dj.at("W");
        const std::string wk = string_of(require(wj, "kind", wpath), join(wpath, "kind"));
        if (wk == "zero") {
          g.W = sde::InteractionKernel::zero();
        } else if (wk == "power") {
          const double p = number(require(wj, "exponent", wpath), join(wpath, "exponent"));
          if (!(p >= 1.0)) throw ConfigError(join(wpath, "exponent"), "must be >= 1");
          g.W = sde::InteractionKernel::power(p, number_or(wj, "scale", wpath, 1.0));
        } else {
          throw ConfigError(join(wpath, "kind"), "unknown interaction kernel '" + wk + "'");
        }
      }
      c.drift = g;
    } else if (kind == "linear_mean_field") {
      c.drift = sde::LinearMeanField{parse_matrix(require(dj, "A", dpath), dim, join(dpath, "A")),
                                     parse_matrix(require(dj, "B", dpath), dim, join(dpath, "B"))};
    } else if (kind == "custom") {
      const std::string name = string_of(require(dj, "name", dpath), join(dpath, "name"));
      try {
        c.drift = sde::make_custom_drift(name, parse_params(dj.value("params", Json()), join(dpath, "params")), dim);
      } catch (const InvalidArgument& e) {
        throw ConfigError(join(dpath, "name"), e.what());
      }
    } else {
      throw ConfigError(join(dpath, "kind"), "unknown drift kind '" + kind + "'");
    }

    const auto spath = join(path, "diffusion");
    if (j.contains("diffusion")) {
      const Json& sj = j.at("diffusion");
      const std::string sk = string_of(require(sj, "kind", spath), join(spath, "kind"));
      if (sk == "scalar") {
        c.diffusion = sde::ScalarDiffusion{number(require(sj, "s", spath), join(spath, "s"))};
      } else if (sk == "constant") {
        c.diffusion = sde::ConstantDiffusion{parse_matrix(require(sj, "sigma", spath), dim, join(spath, "sigma"))};
      } else if (sk == "state_dependent") {
        const std::string name = string_of(require(sj, "name", spath), join(spath, "name"));
        try {
          c.diffusion = sde::make_state_dependent_diffusion(
              name, parse_params(sj.value("params", Json()), join(spath, "params")), dim);
        } catch (const InvalidArgument& e) {
          throw ConfigError(join(spath, "name"), e.what());
        }
      } else {
        throw ConfigError(join(spath, "kind"), "unknown diffusion kind '" + sk + "'");
      }
    }
    if (j.contains("measure_mode")) {
      const std::string m = string_of(j.at("measure_mode"), join(path, "measure_mode"));
      if (m == "empirical") c.measure_mode = sde::MeasureMode::kEmpirical;
      else if (m == "frozen_flow") c.measure_mode = sde::MeasureMode::kFrozenFlow;
      else throw ConfigError(join(path, "measure_mode"), "must be 'empirical' or 'frozen_flow'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return c;
}

sde::InitialLaw parse_initial(const Json& j, int dim, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  const std::string kind = string_of(require(j, "kind", path), join(path, "kind"));
  if (kind == "dirac") return sde::DiracInit{parse_vec(require(j, "point", path), dim, join(path, "point"))};
  if (kind == "uniform") return sde::UniformInit{};
  if (kind == "gaussian") {
    const double sd = number(require(j, "sd", path), join(path, "sd"));
    if (!(sd > 0.0)) throw ConfigError(join(path, "sd"), "must be > 0");
    return sde::GaussianInit{parse_vec(require(j, "mean", path), dim, join(path, "mean")), sd};
  }
  if (kind == "atoms") {
    const auto ppath = join(path, "points");
    const Json& pj = require(j, "points", path);
    if (!pj.is_array() || pj.empty()) throw ConfigError(ppath, "must be a non-empty array");
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < pj.size(); ++i) pts.push_back(parse_vec(pj.at(i), dim, ppath + "[" + std::to_string(i) + "]"));
    return sde::AtomsInit{measures::EmpiricalMeasure::from_points(pts)};
  }
  if (kind == "grid") {
    // n equally spaced atoms on [lower, upper] (1D)
    const double lo = number(require(j, "lower", path), join(path, "lower"));
    const double hi = number(require(j, "upper", path), join(path, "upper"));
    const auto n = u64_of(require(j, "count", path), join(path, "count"));
    if (dim != 1 || n < 1 || !(hi >= lo)) throw ConfigError(path, "grid needs dim 1, count >= 1, lower <= upper");
    std::vector<double> coords(n);
    for (std::uint64_t i = 0; i < n; ++i)
      coords[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return sde::AtomsInit{measures::EmpiricalMeasure(1, std::move(coords))};
  }
  throw ConfigError(join(path, "kind"), "unknown initial law '" + kind + "'");
}

std::function<double(const Vec&)> parse_test_function(const Json& j, const std::string& path) {
  const std::string name = string_of(j, path);
  if (name == "one") return [](const Vec&) { return 1.0; };
  if (name == "sin") return [](const Vec& x) { return std::sin(x[0]); };
  if (name == "cos") return [](const Vec& x) { return std::cos(x[0]); };
  if (name == "x1") return [](const Vec& x) { return x[0]; };
  if (name == "lower_half") return [](const Vec& x) { return x[0] <= 0.5 ? 1.0 : 0.0; };
  throw ConfigError(path, "unknown test function '" + name + "'");
}

RunConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  RunConfig rc;
  rc.document = doc;
  auto& sim = rc.sim;
  sim.domain = parse_domain(require(doc, "domain", ""), "domain");
  const int dim = sim.domain.dim();
  sim.coefficients = parse_coefficients(require(doc, "coefficients", ""), dim, "coefficients");

  const Json& sj = require(doc, "sim", "");
  if (!sj.is_object()) throw ConfigError("sim", "must be an object");
  sim.T = number(require(sj, "T", "sim"), "sim.T");
  sim.h = number(require(sj, "h", "sim"), "sim.h");
  if (!(sim.T > 0.0) || !std::isfinite(sim.T)) throw ConfigError("sim.T", "must be a finite number > 0");
  if (!(sim.h > 0.0)) throw ConfigError("sim.h", "must be > 0");
  if (sim.h > sim.T) throw ConfigError("sim.h", "must be <= sim.T");
  sim.N = static_cast<std::size_t>(u64_of(require(sj, "N", "sim"), "sim.N"));
  if (sim.N < 1) throw ConfigError("sim.N", "must be >= 1");
  sim.seed = sj.contains("seed") ? u64_of(sj.at("seed"), "sim.seed") : 1;
  sim.k = number_or(sj, "k", "sim", 2.0);
  if (!(sim.k >= 0.0)) throw ConfigError("sim.k", "must be >= 0");
  if (sj.contains("snapshot_stride")) {
    sim.snapshot_stride = static_cast<std::size_t>(u64_of(sj.at("snapshot_stride"), "sim.snapshot_stride"));
    if (sim.snapshot_stride < 1) throw ConfigError("sim.snapshot_stride", "must be >= 1");
  }
  if (sj.contains("scheme")) {
    const std::string s = string_of(sj.at("scheme"), "sim.scheme");
    if (s == "auto") sim.scheme = geometry::ReflectionScheme::kAuto;
    else if (s == "projection") sim.scheme = geometry::ReflectionScheme::kProjection;
    else throw ConfigError("sim.scheme", "must be 'auto' or 'projection'");
  }
  sim.initial = sj.contains("initial") ? parse_initial(sj.at("initial"), dim, "sim.initial") : sde::UniformInit{};
  if (std::holds_alternative<sde::UniformInit>(sim.initial) && !sim.domain.bounded())
    throw ConfigError("sim.initial", "uniform initial law needs a bounded domain");
  try {
    sim.coefficients.validate(sim.domain, false, sim.seed);
  } catch (const Error& e) {
    throw ConfigError("coefficients", e.what());
  }

  if (doc.contains("verify")) {
    const Json& vj = doc.at("verify");
    if (!vj.is_object()) throw ConfigError("verify", "must be an object");
    rc.verify.raw = vj;
    if (vj.contains("checks")) {
      const Json& cj = vj.at("checks");
      if (!cj.is_array()) throw ConfigError("verify.checks", "must be an array of names");
      for (std::size_t i = 0; i < cj.size(); ++i) rc.verify.checks.push_back(string_of(cj.at(i), "verify.checks"));
    }
  }

  if (doc.contains("picard")) {
    const Json& pj = doc.at("picard");
    auto& o = rc.picard.options;
    if (pj.contains("max_iter")) o.max_iter = static_cast<std::size_t>(u64_of(pj.at("max_iter"), "picard.max_iter"));
    if (o.max_iter < 1) throw ConfigError("picard.max_iter", "must be >= 1");
    o.tol = number_or(pj, "tol", "picard", o.tol);
    o.lambda = number_or(pj, "lambda", "picard", o.lambda);
  }

  if (doc.contains("couple")) {
    const Json& cj = doc.at("couple");
    CoupleSettings cs;
    cs.x0 = parse_vec(require(cj, "x0", "couple"), dim, "couple.x0");
    cs.y0 = parse_vec(require(cj, "y0", "couple"), dim, "couple.y0");
    cs.options.t0 = number(require(cj, "t0", "couple"), "couple.t0");
    cs.options.L = number_or(cj, "L", "couple", 1.0);
    if (!(cs.options.t0 > 0.0)) throw ConfigError("couple.t0", "must be > 0");
    if (cs.options.t0 > sim.T * (1.0 + 1e-12)) throw ConfigError("couple.t0", "must be <= sim.T");
    if (!(cs.options.L > 0.0)) throw ConfigError("couple.L", "must be > 0");
    if (cj.contains("pairs")) cs.options.pairs = static_cast<std::size_t>(u64_of(cj.at("pairs"), "couple.pairs"));
    if (cs.options.pairs < 1) throw ConfigError("couple.pairs", "must be >= 1");
    rc.couple = cs;
  }

  if (doc.contains("pde")) {
    const Json& pj = doc.at("pde");
    auto& p = rc.pde;
    p.present = true;
    if (dim > 2) throw ConfigError("pde", "needs a 1D or 2D domain");
    const auto [lo, hi] = sim.domain.bounding_box();
    if (!sim.domain.bounded() ||
        !(std::holds_alternative<geometry::Interval>(sim.domain.shape()) ||
          std::holds_alternative<geometry::Box>(sim.domain.shape())))
      throw ConfigError("domain", "pde needs a bounded interval or box");
    for (int a = 0; a < dim; ++a) {
      p.lower[a] = lo[a];
      p.upper[a] = hi[a];
    }
    if (pj.contains("grid")) {
      const Json& gj = pj.at("grid");
      const Vec glo = parse_vec(require(gj, "lower", "pde.grid"), dim, "pde.grid.lower");
      const Vec ghi = parse_vec(require(gj, "upper", "pde.grid"), dim, "pde.grid.upper");
      for (int a = 0; a < dim; ++a)
        if (std::abs(glo[a] - lo[a]) > 1e-12 || std::abs(ghi[a] - hi[a]) > 1e-12)
          throw ConfigError("pde.grid", "does not match the domain");
    }
    const Json& gj = require(pj, "G", "pde");
    if (gj.is_array()) {
      const auto g = parse_number_list(gj, "pde.G");
      if (static_cast<int>(g.size()) != dim) throw ConfigError("pde.G", "needs one count per axis");
      for (int a = 0; a < dim; ++a) p.cells[a] = static_cast<std::size_t>(g[a]);
    } else {
      p.cells[0] = p.cells[1] = static_cast<std::size_t>(u64_of(gj, "pde.G"));
    }
    for (int a = 0; a < dim; ++a)
      if (p.cells[a] < 1) throw ConfigError("pde.G", "must be >= 1");
    p.snapshot_times = pj.contains("snapshot_times") ? parse_number_list(pj.at("snapshot_times"), "pde.snapshot_times")
                                                     : std::vector<double>{sim.T};
    double prev = 0.0;
    for (double t : p.snapshot_times) {
      if (!(t > prev) || t > sim.T * (1.0 + 1e-12))
        throw ConfigError("pde.snapshot_times", "must be increasing in (0, sim.T]");
      prev = t;
    }
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace rsde::cli
