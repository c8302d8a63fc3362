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

#include "rsde/cli/commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "rsde/cli/config.hpp"
#include "rsde/csv.hpp"
#include "rsde/error.hpp"

namespace rsde::cli {
namespace fs = std::filesystem;
namespace {

constexpr int kCsvSchemaVersion = 1;

const std::set<std::string>& known_checks() {
  static const std::set<std::string> names = {"moment_bound",      "local_time_moments", "w2_contraction",
                                              "log_harnack",       "gradient_estimate",  "occupation",
                                              "interior_cone",     "psi_class"};
  return names;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// <out>.partial while running, renamed to <out> on completion.
class RunDirectory {
 public:
  RunDirectory(fs::path final_dir, Json manifest) : final_(std::move(final_dir)), manifest_(std::move(manifest)) {
    if (final_.empty()) throw ConfigError("--out", "is required");
    if (fs::exists(final_) && !fs::exists(final_ / "manifest.json"))
      throw ConfigError("--out", "'" + final_.string() + "' exists and is not a run directory");
    partial_ = final_;
    partial_ += ".partial";
    fs::remove_all(partial_);
    fs::create_directories(partial_);
    manifest_["status"] = "running";
    manifest_["started_at"] = utc_now();
    write_manifest();
  }

  fs::path file(const std::string& name) const { return partial_ / name; }

  void add_file(const std::string& name) { manifest_["files"].push_back(name); }

  void finish(int exit_code) {
    manifest_["status"] = exit_code == kExitOk ? "ok" : (exit_code == kExitCheckFailed ? "check_failed" : "error");
    manifest_["exit_code"] = exit_code;
    manifest_["finished_at"] = utc_now();
    write_manifest();
    if (exit_code == kExitOk || exit_code == kExitCheckFailed) {
      fs::remove_all(final_);
      fs::rename(partial_, final_);
    }
  }

 private:
  void write_manifest() const {
    std::ofstream o(partial_ / "manifest.json");
    o << manifest_.dump(2) << "\n";
  }

  fs::path final_;
  fs::path partial_;
  Json manifest_;
};

void write_summary(RunDirectory& dir, const std::vector<std::string>& lines) {
  std::ofstream o(dir.file("summary.txt"));
  for (const auto& l : lines) o << l << "\n";
  dir.add_file("summary.txt");
}

void write_flow_csv(const std::string& path, const sde::MeasureFlow& flow) {
  const int d = flow.snapshots.front().dim();
  std::vector<std::string> header = {"t", "atom_id"};
  for (int a = 0; a < d; ++a) header.push_back("x" + std::to_string(a + 1));
  CsvWriter w(path, header);
  for (std::size_t s = 0; s < flow.size(); ++s) {
    const auto& mu = flow.snapshots[s];
    for (std::size_t p = 0; p < mu.size(); ++p) {
      w.field(flow.times[s]).field(p);
      for (int a = 0; a < d; ++a) w.field(mu.coords()[p * static_cast<std::size_t>(d) + a]);
      w.end_row();
    }
  }
}

const Json& section(const RunConfig& rc, const std::string& name) {
  static const Json empty = Json::object();
  auto it = rc.verify.raw.find(name);
  return it == rc.verify.raw.end() ? empty : *it;
}

std::vector<double> t_grid_of(const Json& j, const std::string& path) {
  if (!j.contains("t_grid")) throw ConfigError(path + ".t_grid", "is required");
  return parse_number_list(j.at("t_grid"), path + ".t_grid");
}

sde::InitialLaw law_of(const Json& j, const std::string& key, int dim, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "." + key, "is required");
  return parse_initial(j.at(key), dim, path + "." + key);
}

double num(const Json& j, const std::string& key, double fallback) {
  return j.contains(key) && j.at(key).is_number() ? j.at(key).get<double>() : fallback;
}

// Parses every requested check section up front so configuration errors
// surface before any simulation runs.
std::vector<std::function<verify::VerificationReport()>> plan_checks(const RunConfig& rc,
                                                                    const std::vector<std::string>& names) {
  const auto& cfg = rc.sim;
  const int dim = cfg.domain.dim();
  std::vector<std::function<verify::VerificationReport()>> plan;
  for (const auto& name : names) {
    const std::string path = "verify." + name;
    const Json& j = section(rc, name);
    if (name == "moment_bound") {
      const double k = num(j, "k", std::max(1.0, cfg.k));
      std::vector<Vec> starts;
      if (j.contains("starts")) {
        const Json& s = j.at("starts");
        if (!s.is_array() || s.empty()) throw ConfigError(path + ".starts", "must be a non-empty array");
        for (std::size_t i = 0; i < s.size(); ++i) starts.push_back(parse_vec(s.at(i), dim, path + ".starts"));
      } else if (const auto* d = std::get_if<sde::DiracInit>(&cfg.initial)) {
        starts.push_back(d->point);
      } else {
        throw ConfigError(path + ".starts", "is required");
      }
      const double tol = num(j, "tolerance", 2.0);
      plan.push_back([=] { return verify::check_moment_bound(cfg, k, starts, tol); });
    } else if (name == "local_time_moments") {
      const auto ks = j.contains("ks") ? parse_number_list(j.at("ks"), path + ".ks") : std::vector<double>{1.0, 2.0};
      const double tol = num(j, "tolerance", 1.5);
      plan.push_back([=] { return verify::check_local_time_moments(cfg, ks, tol); });
    } else if (name == "w2_contraction") {
      const auto mu0 = law_of(j, "mu0", dim, path);
      const auto nu0 = law_of(j, "nu0", dim, path);
      const auto grid = t_grid_of(j, path);
      const bool mono = j.value("monotone", false);
      plan.push_back([=] { return verify::check_w2_contraction(cfg, mu0, nu0, grid, mono); });
    } else if (name == "log_harnack") {
      const auto mu0 = law_of(j, "mu0", dim, path);
      const auto nu0 = law_of(j, "nu0", dim, path);
      const auto grid = t_grid_of(j, path);
      verify::LogHarnackOptions o;
      o.bins = static_cast<std::size_t>(num(j, "bins", 64));
      o.slope_min = num(j, "slope_min", o.slope_min);
      o.slope_max = num(j, "slope_max", o.slope_max);
      plan.push_back([=] { return verify::check_log_harnack(cfg, mu0, nu0, grid, o); });
    } else if (name == "gradient_estimate") {
      const auto f = parse_test_function(j.contains("f") ? j.at("f") : Json("sin"), path + ".f");
      const auto law = law_of(j, "nu0", dim, path);
      const Vec dir = j.contains("direction") ? parse_vec(j.at("direction"), dim, path + ".direction") : Vec::unit(dim, 0);
      const auto grid = t_grid_of(j, path);
      verify::GradientOptions o;
      o.epsilon = num(j, "epsilon", o.epsilon);
      plan.push_back([=] {
        sde::SimConfig c = cfg;
        c.initial = law;
        const auto nu0 = sde::sample_initial(c).measure();
        return verify::check_gradient_estimate(cfg, f, nu0, dir, grid, o);
      });
    } else if (name == "occupation") {
      const auto f = parse_test_function(j.contains("f") ? j.at("f") : Json("one"), path + ".f");
      const std::optional<double> expected = j.contains("expected") ? std::optional(num(j, "expected", 0.0)) : std::nullopt;
      const double tol = num(j, "tolerance", 0.0);
      plan.push_back([=] {
        const auto e = verify::occupation_integral(cfg, f);
        verify::VerificationReport r;
        r.check = "occupation";
        r.estimate = e.value;
        r.ci_lo = e.lo;
        r.ci_hi = e.hi;
        r.tolerance = tol;
        r.metadata = {{"N", std::to_string(cfg.N)}, {"h", format_double(cfg.h)},
                      {"T", format_double(cfg.T)}, {"seed", std::to_string(cfg.seed)}};
        if (expected) {
          r.rule = "|estimate - expected| <= tolerance or expected inside the CI";
          r.pass = std::abs(e.value - *expected) <= tol || (e.lo <= *expected && *expected <= e.hi);
          r.rows.push_back({"expected", cfg.T, e.value, e.lo, e.hi, *expected});
        } else {
          r.rule = "finite estimate";
          r.pass = std::isfinite(e.value);
        }
        return r;
      });
    } else if (name == "interior_cone") {
      const double r0 = num(j, "r0", cfg.domain.r0().value_or(1.0));
      const auto samples = static_cast<std::size_t>(num(j, "samples", 1000));
      plan.push_back([=] { return verify::check_interior_cone(cfg.domain, r0, samples, cfg.seed); });
    } else if (name == "psi_class") {
      const std::string psi = j.value("psi", std::string("bounded_exp"));
      const double kappa = num(j, "kappa", 1.0);
      const double k = num(j, "k", 1.0);
      measures::PsiFunction f;
      if (psi == "identity") f = measures::PsiFunction::identity(kappa);
      else if (psi == "power") f = measures::PsiFunction::power(k, kappa);
      else if (psi == "bounded_exp") f = measures::PsiFunction::bounded_exp(kappa);
      else if (psi == "log1p") f = measures::PsiFunction::log1p(kappa);
      else throw ConfigError(path + ".psi", "unknown psi '" + psi + "'");
      plan.push_back([=] { return verify::check_psi_class(f); });
    }
  }
  return plan;
}

using Body = std::function<int(const RunConfig&, RunDirectory&, std::ostream&)>;

int cmd_simulate(const RunConfig& rc, RunDirectory& dir, std::ostream& out) {
  const auto& cfg = rc.sim;
  const int d = cfg.domain.dim();
  const auto total = cfg.grid().steps;
  std::vector<std::string> header = {"t", "particle_id"};
  for (int a = 0; a < d; ++a) header.push_back("x" + std::to_string(a + 1));
  header.push_back("l");
  header.push_back("l_tilde");
  {
    CsvWriter flow(dir.file("flow.csv").string(), header);
    auto emit = [&](const sde::ParticleEnsemble& ens) {
      for (std::size_t p = 0; p < ens.size(); ++p) {
        flow.field(ens.time).field(ens.ids[p]);
        for (int a = 0; a < d; ++a) flow.field(ens.positions[p * static_cast<std::size_t>(d) + a]);
        flow.field(ens.local_time[p]).field(ens.tilde_local_time[p]).end_row();
      }
    };
    sde::SimConfig c = cfg;
    c.snapshot_stride = static_cast<std::size_t>(total);
    c.validate();
    emit(sde::sample_initial(c));
    const auto res = sde::simulate_mckean(c, [&](const sde::ParticleEnsemble& ens) {
      if (ens.step % cfg.snapshot_stride == 0 || ens.step == total) emit(ens);
    });
    CsvWriter stats(dir.file("stats.csv").string(), {"particle_id", "sup_abs", "l_T", "l_tilde_T"});
    for (std::size_t p = 0; p < res.stats.sup_abs.size(); ++p)
      stats.field(p).field(res.stats.sup_abs[p]).field(res.stats.local_time[p]).field(res.stats.tilde_local_time[p]).end_row();
  }
  dir.add_file("flow.csv");
  dir.add_file("stats.csv");
  write_summary(dir, {"simulate: " + std::to_string(cfg.N) + " particles, " + std::to_string(total) + " steps"});
  out << "simulate: ok\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& rc, const std::vector<std::string>& names, RunDirectory& dir, std::ostream& out) {
  auto plan = plan_checks(rc, names);
  bool all = true;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto rep = plan[i]();
    const std::string file = "verify_" + names[i] + ".csv";
    rep.write_csv(dir.file(file).string());
    dir.add_file(file);
    lines.push_back(rep.summary());
    out << rep.summary() << "\n";
    all = all && rep.pass;
  }
  write_summary(dir, lines);
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_picard(const RunConfig& rc, RunDirectory& dir, std::ostream& out) {
  const auto gamma = sde::sample_initial(rc.sim).measure();
  const auto res = sde::picard_solve(rc.sim, gamma, rc.picard.options);
  {
    CsvWriter w(dir.file("picard.csv").string(), {"iteration", "distance", "weighted_distance"});
    for (std::size_t m = 0; m < res.distances.size(); ++m)
      w.field(m).field(res.distances[m]).field(res.weighted_distances[m]).end_row();
  }
  write_flow_csv(dir.file("fixed_point.csv").string(), res.fixed_point);
  dir.add_file("picard.csv");
  dir.add_file("fixed_point.csv");
  const std::string line = std::string("picard: ") + (res.converged ? "converged" : "not converged") +
                           " iterations=" + std::to_string(res.iterations);
  write_summary(dir, {line});
  out << line << "\n";
  return res.converged ? kExitOk : kExitCheckFailed;
}

int cmd_couple(const RunConfig& rc, RunDirectory& dir, std::ostream& out) {
  if (!rc.couple) throw ConfigError("couple", "is required");
  auto opts = rc.couple->options;
  std::optional<sde::MeasureFlow> mu, nu;
  if (rc.sim.coefficients.depends_on_measure()) {
    sde::SimConfig c = rc.sim;
    c.initial = sde::DiracInit{rc.couple->x0};
    mu = sde::simulate_mckean(c).flow;
    c.initial = sde::DiracInit{rc.couple->y0};
    nu = sde::simulate_mckean(c).flow;
    opts.mu_flow = &*mu;
    opts.nu_flow = &*nu;
  }
  const auto rec = sde::couple_pair(rc.sim, rc.couple->x0, rc.couple->y0, opts);
  {
    CsvWriter w(dir.file("coupling.csv").string(), {"t", "mean_gap"});
    for (std::size_t i = 0; i < rec.times.size(); ++i) w.field(rec.times[i]).field(rec.mean_gap[i]).end_row();
    CsvWriter p(dir.file("pairs.csv").string(), {"pair", "terminal_gap", "cost"});
    for (std::size_t i = 0; i < rec.costs.size(); ++i) p.field(i).field(rec.terminal_gaps[i]).field(rec.costs[i]).end_row();
  }
  dir.add_file("coupling.csv");
  dir.add_file("pairs.csv");
  const std::string line = "couple: mean_terminal_gap=" + format_double(rec.mean_terminal_gap) +
                           " mean_cost=" + format_double(rec.mean_cost) +
                           " clamped=" + (rec.clamped ? std::string("true") : std::string("false")) +
                           " clamped_steps=" + std::to_string(rec.clamped_steps) + " xi_min=" + format_double(rec.xi_min);
  write_summary(dir, {line});
  out << line << "\n";
  return kExitOk;
}

int cmd_pde_compare(const RunConfig& rc, RunDirectory& dir, std::ostream& out) {
  if (!rc.pde.present) throw ConfigError("pde", "is required");
  const auto& cfg = rc.sim;
  const auto& p = rc.pde;
  const int d = cfg.domain.dim();
  const auto grid = cfg.grid();
  for (double t : p.snapshot_times) {
    const double n = t / cfg.h;
    if (std::abs(t - cfg.T) > 1e-12 * cfg.T && std::abs(n - std::round(n)) > 1e-6)
      throw ConfigError("pde.snapshot_times", "must lie on the simulation grid");
  }
  sde::MeasureFlow flow;
  sde::SimConfig c = cfg;
  c.T = p.snapshot_times.back();
  c.snapshot_stride = static_cast<std::size_t>(c.grid().steps);
  std::size_t next = 0;
  auto res = sde::simulate_mckean(c, [&](const sde::ParticleEnsemble& ens) {
    while (next < p.snapshot_times.size() && std::abs(ens.time - p.snapshot_times[next]) <= 1e-9 * std::max(1.0, ens.time)) {
      flow.times.push_back(p.snapshot_times[next]);
      flow.snapshots.push_back(ens.measure());
      ++next;
    }
  });
  (void)grid;
  flow.times.insert(flow.times.begin(), 0.0);
  flow.snapshots.insert(flow.snapshots.begin(), res.flow.snapshots.front());

  pde::DensityGrid g0 = d == 1 ? pde::DensityGrid::interval(p.lower[0], p.upper[0], p.cells[0])
                               : pde::DensityGrid::box(p.lower, p.upper, p.cells);
  g0 = pde::initial_density(cfg.initial, g0);
  pde::SolveOptions so;
  so.snapshot_times = p.snapshot_times;
  const auto traj = pde::solve(g0, cfg.coefficients, so);
  const auto rows = pde::compare_particle_pde(flow, traj);
  {
    std::vector<std::string> header = {"t"};
    for (int a = 0; a < d; ++a) header.push_back("x" + std::to_string(a + 1));
    header.push_back("density");
    CsvWriter w(dir.file("density.csv").string(), header);
    for (const auto& g : traj.snapshots)
      for (std::size_t k = 0; k < g.size(); ++k) {
        w.field(g.time);
        const Vec x = g.cell_center(k);
        for (int a = 0; a < d; ++a) w.field(x[a]);
        w.field(g.density[k]).end_row();
      }
    CsvWriter l(dir.file("l1.csv").string(), {"t", "l1", "pde_mass"});
    for (const auto& r : rows) l.field(r.time).field(r.l1).field(r.pde_mass).end_row();
  }
  dir.add_file("density.csv");
  dir.add_file("l1.csv");
  const std::string line = "pde-compare: final L1=" + format_double(rows.back().l1) +
                           " max mass defect=" + format_double(traj.max_mass_defect) +
                           " steps=" + std::to_string(traj.steps);
  write_summary(dir, {line});
  out << line << "\n";
  const Json& pj = rc.document.at("pde");
  if (pj.contains("l1_tolerance") && rows.back().l1 > pj.at("l1_tolerance").get<double>()) return kExitCheckFailed;
  return kExitOk;
}

}  // namespace

int run_command(const std::string& command, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  static const std::set<std::string> commands = {"simulate", "verify", "picard", "couple", "pde-compare"};
  std::optional<RunDirectory> dir;
  try {
    if (!commands.contains(command)) throw ConfigError("command", "unknown command '" + command + "'");
    if (options.config_path.empty()) throw ConfigError("--config", "is required");
    if (options.threads < 1) throw ConfigError("--threads", "must be >= 1");
    Json doc;
    {
      std::ifstream in(options.config_path);
      if (!in) throw ConfigError("--config", "cannot open '" + options.config_path + "'");
      try {
        doc = Json::parse(in);
      } catch (const Json::exception& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
      }
    }
    if (options.seed && doc.is_object() && doc.contains("sim") && doc["sim"].is_object()) doc["sim"]["seed"] = *options.seed;
    RunConfig rc = parse_config(doc);
    rc.sim.threads = options.threads;

    std::vector<std::string> checks;
    if (command == "verify") {
      checks = options.checks ? *options.checks : rc.verify.checks;
      if (checks.empty()) throw ConfigError("--checks", "no checks requested");
      for (const auto& c : checks)
        if (!known_checks().contains(c)) throw ConfigError("--checks", "unknown check '" + c + "'");
      plan_checks(rc, checks);
    }

    Json manifest = {{"command", command},
                     {"config_path", fs::absolute(options.config_path).string()},
                     {"output_dir", fs::absolute(options.out_dir).string()},
                     {"seed", rc.sim.seed},
                     {"threads", options.threads},
                     {"artifact_version", RSDE_VERSION},
                     {"csv_schema_version", kCsvSchemaVersion},
                     {"argv", options.argv},
                     {"files", Json::array({"manifest.json", "config.json"})}};
    if (command == "verify") manifest["checks"] = checks;
    dir.emplace(fs::path(options.out_dir), manifest);
    {
      std::ofstream o(dir->file("config.json"));
      o << doc.dump(2) << "\n";
    }

    int code = kExitOk;
    if (command == "simulate") code = cmd_simulate(rc, *dir, out);
    else if (command == "verify") code = cmd_verify(rc, checks, *dir, out);
    else if (command == "picard") code = cmd_picard(rc, *dir, out);
    else if (command == "couple") code = cmd_couple(rc, *dir, out);
    else code = cmd_pde_compare(rc, *dir, out);
    dir->finish(code);
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    if (dir) dir->finish(kExitConfigError);
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    if (dir) dir->finish(kExitRuntimeError);
    return kExitRuntimeError;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reflected McKean-Vlasov simulation and verification"};
  app.require_subcommand(1);
  CommandOptions options;
  for (int i = 0; i < argc; ++i) options.argv.emplace_back(argv[i]);
  std::uint64_t seed = 0;
  std::string checks;
  std::vector<CLI::App*> subs;
  for (const char* name : {"simulate", "verify", "picard", "couple", "pde-compare"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config_path, "JSON configuration file")->required();
    sub->add_option("--out", options.out_dir, "output run directory")->required();
    sub->add_option("--seed", seed, "override sim.seed");
    sub->add_option("--threads", options.threads, "worker threads (speed only)");
    if (std::string(name) == "verify") sub->add_option("--checks", checks, "comma-separated check names");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitConfigError;
  }
  for (auto* sub : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed") > 0) options.seed = seed;
    if (sub->get_name() == "verify" && sub->count("--checks") > 0) {
      std::vector<std::string> list;
      std::stringstream ss(checks);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) list.push_back(item);
      options.checks = list;
    }
    return run_command(sub->get_name(), options, out, err);
  }
  return kExitConfigError;
}

}  // namespace rsde::cli
