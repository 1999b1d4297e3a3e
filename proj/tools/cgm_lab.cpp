// cgm_lab: command-line front end for the corner growth model toolkit.
//
// Exit status: 0 when every check passes, 1 when a statistical or
// deterministic check fails, 2 on usage, parse or domain errors.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cgm/analytic.hpp"
#include "cgm/bounds.hpp"
#include "cgm/config.hpp"
#include "cgm/lattice.hpp"
#include "cgm/lpp.hpp"
#include "cgm/mc.hpp"
#include "cgm/report.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Output {
  std::string path;
  std::string format = "json";
};

void emit(const Output& out, const std::string& body) {
  if (out.path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + out.path + "'");
  f << body;
}

void add_output_flags(CLI::App* cmd, Output& out) {
  cmd->add_option("--out", out.path, "Output file (default: stdout)");
  cmd->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

// analytic eval --------------------------------------------------------------

struct AnalyticArgs {
  std::string fn;
  double x = 1.0, y = 1.0, w = 0.5, z = 0.5, s = 0.0, lambda = 0.0, w_cap = 1.0, z_floor = 0.0;
};

std::string with_decimal_point(double v) {
  std::string s = cgm::format_double(v);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string eval_analytic(const AnalyticArgs& a) {
  using namespace cgm;
  const Direction d(a.x, a.y);
  const auto one = [](double v) { return with_decimal_point(v) + "\n"; };
  const auto two = [](std::pair<double, double> p) {
    return with_decimal_point(p.first) + " " + with_decimal_point(p.second) + "\n";
  };
  const RateQuery q{a.s, a.lambda, a.w_cap, a.z_floor};
  const std::map<std::string, std::function<std::string()>> table{
      {"gamma", [&] { return one(shape_gamma(d)); }},
      {"zeta", [&] { return one(shape_zeta(d)); }},
      {"sigma", [&] { return one(characteristic(d).sigma); }},
      {"M", [&] { return one(mean_M(a.z, d)); }},
      {"L", [&] { return one(lmgf_line_L({a.w, a.z}, d)); }},
      {"I", [&] { return one(tilt_area_I({a.w, a.z}, a.s, d)); }},
      {"zeta_pm", [&] { return two(balanced_pair_zeta_pm(a.lambda, d)); }},
      {"xi_pm", [&] { return two(level_pair_xi_pm(a.s, d)); }},
      {"envelope", [&] { return one(lmgf_envelope(q, d).as_double()); }},
      {"rate_bulk", [&] { return one(rate_bulk(a.s, d)); }},
      {"rate_restricted", [&] { return one(rate_restricted(a.s, d, a.w_cap, a.z_floor)); }},
      {"cif_limit", [&] { return one(cif_limit_cdf(a.x / (a.x + a.y))); }},
  };
  const auto it = table.find(a.fn);
  if (it == table.end()) throw CLI::ValidationError("--fn", "unknown function '" + a.fn + "'");
  return it->second();
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::uint64_t seed = 1;
  cgm::Coord m = 10, n = 10;
  std::string model = "bulk";
  double w = 0.5, z = 0.5;
};

std::string simulate_lpp(const SimulateArgs& a, const Output& out) {
  using namespace cgm;
  const bool bulk = a.model == "bulk";
  const WeightField field = bulk ? WeightField::bulk({a.seed, 0}) : WeightField::boundary({a.seed, 0}, a.w, a.z);
  const PassageGrid g = bulk ? solve_bulk(field, {1, 1}, {a.m, a.n}) : solve_boundary(field, {a.m, a.n});
  if (out.format == "json") {
    nlohmann::ordered_json j;
    j["model"] = a.model;
    j["seed"] = a.seed;
    auto rows = nlohmann::ordered_json::array();
    for (Coord jj = g.lo().j; jj <= g.hi().j; ++jj) {
      auto row = nlohmann::ordered_json::array();
      for (Coord i = g.lo().i; i <= g.hi().i; ++i) row.push_back(g(i, jj));
      rows.push_back(std::move(row));
    }
    j["origin"] = {g.lo().i, g.lo().j};
    j["values"] = std::move(rows);
    return j.dump(2) + "\n";
  }
  std::string csv = "i,j,value\n";
  for (Coord jj = g.lo().j; jj <= g.hi().j; ++jj) {
    for (Coord i = g.lo().i; i <= g.hi().i; ++i) {
      csv += std::to_string(i) + "," + std::to_string(jj) + "," + format_double(g(i, jj)) + "\n";
    }
  }
  return csv;
}

std::string simulate_cif(const SimulateArgs& a, const Output& out) {
  using namespace cgm;
  if (a.n < 1) throw std::domain_error("n must be >= 1");
  const CifPath p = competition_interface(WeightField::bulk({a.seed, 0}), a.n);
  if (out.format == "json") {
    nlohmann::ordered_json j;
    j["seed"] = a.seed;
    j["ties"] = p.ties;
    auto path = nlohmann::ordered_json::array();
    for (const auto& v : p.phi) path.push_back({v.i, v.j});
    j["phi"] = std::move(path);
    return j.dump(2) + "\n";
  }
  std::string csv = "n,phi_hor,phi_ver\n";
  for (std::size_t k = 0; k < p.phi.size(); ++k) {
    csv += std::to_string(k + 1) + "," + std::to_string(p.phi[k].i) + "," + std::to_string(p.phi[k].j) + "\n";
  }
  return csv;
}

// experiment -----------------------------------------------------------------

struct ExperimentArgs {
  std::string config_path;
  std::map<std::string, std::string> flags;  // key -> raw value
  bool timing = false;
};

void add_experiment_flags(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--config", args.config_path, "Flat key = value configuration file");
  const auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(name, [&args, key](const std::string& v) { args.flags[key] = v; }, help);
  };
  flag("--seed", "seed", "Master seed (u64)");
  flag("--reps", "reps", "Number of replicates");
  flag("--workers", "workers", "Worker threads (results do not depend on it)");
  flag("--m", "m", "Horizontal size");
  flag("--n", "n", "Vertical size (steps for cif)");
  flag("--w", "w", "Horizontal boundary parameter");
  flag("--z", "z", "Vertical boundary parameter");
  flag("--s-grid", "s_grid", "Comma-separated levels");
  flag("--x-grid", "x_grid", "Comma-separated points in [0,1] (cif)");
  flag("--model", "model", "bulk or stationary (tail)");
  flag("--k", "k", "Horizontal Busemann count");
  flag("--l", "l", "Vertical Busemann count");
  flag("--sizes", "sizes", "Comma-separated square sizes for exit scaling");
  flag("--scaling-reps", "scaling_reps", "Replicates per scaling size");
  flag("--quantile", "quantile", "Exit quantile level");
  flag("--level", "level", "Confidence level");
  flag("--allow-positive-exponent", "allow_positive_exponent", "true to allow w > z (rains)");
  cmd->add_flag("--timing", args.timing, "Add wall-clock seconds to the report (breaks byte stability)");
}

int run_experiment_cmd(cgm::ExperimentKind kind, const ExperimentArgs& args, const Output& out) {
  cgm::KeyValues kv;
  if (!args.config_path.empty()) kv = cgm::load_key_values(args.config_path);
  for (const auto& [key, value] : args.flags) kv[key] = value;
  const cgm::ExperimentConfig cfg = cgm::build_config(kind, kv);
  const auto t0 = std::chrono::steady_clock::now();
  cgm::Report report = cgm::run_experiment(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (args.timing) report.wall_seconds = secs;
  emit(out, out.format == "csv" ? report.to_csv() : report.to_json());
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& c : report.checks) {
    std::cerr << (c.pass ? "PASS " : "FAIL ") << report.experiment << "/" << c.name << " = "
              << cgm::format_double(c.value) << " (" << c.rule << ")\n";
  }
  return report.pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corner growth model lab: analytic functions, lattice solvers and Monte Carlo checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cgm::kToolVersion));

  std::function<int()> action;

  // analytic eval
  auto* analytic = app.add_subcommand("analytic", "Closed-form functions");
  analytic->require_subcommand(1);
  AnalyticArgs aa;
  auto* eval = analytic->add_subcommand("eval", "Evaluate one function");
  eval->add_option("--fn", aa.fn, "gamma|zeta|sigma|M|L|I|zeta_pm|xi_pm|envelope|rate_bulk|rate_restricted|cif_limit")
      ->required();
  eval->add_option("--x", aa.x, "Direction x");
  eval->add_option("--y", aa.y, "Direction y");
  eval->add_option("--w", aa.w, "Parameter w");
  eval->add_option("--z", aa.z, "Parameter z");
  eval->add_option("--s", aa.s, "Level s");
  eval->add_option("--lambda", aa.lambda, "Pair distance lambda");
  eval->add_option("--w-cap", aa.w_cap, "Horizontal cap");
  eval->add_option("--z-floor", aa.z_floor, "Vertical floor");
  eval->callback([&] { action = [&] { std::cout << eval_analytic(aa); return kExitPass; }; });

  // simulate lpp / cif
  auto* simulate = app.add_subcommand("simulate", "Single-realization dumps");
  simulate->require_subcommand(1);
  SimulateArgs sa;
  Output sim_out;
  sim_out.format = "csv";
  auto* sim_lpp = simulate->add_subcommand("lpp", "Last-passage grid");
  sim_lpp->add_option("--seed", sa.seed, "Master seed");
  sim_lpp->add_option("--m", sa.m, "Horizontal size");
  sim_lpp->add_option("--n", sa.n, "Vertical size");
  sim_lpp->add_option("--model", sa.model, "bulk or boundary")->check(CLI::IsMember({"bulk", "boundary"}));
  sim_lpp->add_option("--w", sa.w, "Boundary parameter w");
  sim_lpp->add_option("--z", sa.z, "Boundary parameter z");
  add_output_flags(sim_lpp, sim_out);
  sim_lpp->callback([&] { action = [&] { emit(sim_out, simulate_lpp(sa, sim_out)); return kExitPass; }; });
  auto* sim_cif = simulate->add_subcommand("cif", "Competition interface path");
  sim_cif->add_option("--seed", sa.seed, "Master seed");
  sim_cif->add_option("--n", sa.n, "Number of steps");
  add_output_flags(sim_cif, sim_out);
  sim_cif->callback([&] { action = [&] { emit(sim_out, simulate_cif(sa, sim_out)); return kExitPass; }; });

  // check crossing / reflection / bounds
  auto* check = app.add_subcommand("check", "Deterministic verifications");
  check->require_subcommand(1);
  std::uint64_t grids = 10000, seed = 1, seeds = 100;
  cgm::Coord size = 6, rm = 4, rn = 4;
  double rw = 0.5, rz = 0.5;
  auto* crossing = check->add_subcommand("crossing", "Fuzz the planar comparison inequalities");
  crossing->add_option("--grids", grids, "Number of random grids");
  crossing->add_option("--size", size, "Grid side length");
  crossing->add_option("--seed", seed, "Master seed");
  crossing->callback([&] {
    action = [&] {
      const auto res = cgm::crossing_fuzz(seed, grids, size);
      std::cout << "grids " << res.grids << " violations " << res.violations.size() << "\n";
      return res.violations.empty() ? kExitPass : kExitFail;
    };
  });
  auto* reflection = check->add_subcommand("reflection", "Northeast/southwest pathwise reflection");
  reflection->add_option("--m", rm, "Interior width");
  reflection->add_option("--n", rn, "Interior height");
  reflection->add_option("--w", rw, "Row parameter w");
  reflection->add_option("--z", rz, "Column parameter z");
  reflection->add_option("--seeds", seeds, "Number of replicates");
  reflection->add_option("--seed", seed, "Master seed");
  reflection->callback([&] {
    action = [&] {
      std::size_t pairs = 0, bad = 0;
      for (std::uint64_t r = 0; r < seeds; ++r) {
        const auto res = cgm::northeast_reflection_check({seed, r}, rw, rz, rm, rn);
        pairs += res.pairs_checked;
        bad += res.mismatches;
      }
      std::cout << "pairs " << pairs << " mismatches " << bad << "\n";
      return bad == 0 ? kExitPass : kExitFail;
    };
  });
  auto* bounds = check->add_subcommand("bounds", "Quadrature check of the tail and integral bounds");
  bounds->callback([&] {
    action = [&] {
      const auto grid = cgm::default_appendix_grid();
      const auto res = cgm::check_appendix_bounds(grid);
      std::cout << "checked " << res.checked << " violations " << res.violations.size() << " nonconverged "
                << res.nonconverged.size() << "\n";
      return res.ok() ? kExitPass : kExitFail;
    };
  });

  // experiment <kind>
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo experiments");
  experiment->require_subcommand(1);
  ExperimentArgs ea;
  Output exp_out;
  for (auto kind : {cgm::ExperimentKind::rains, cgm::ExperimentKind::burke, cgm::ExperimentKind::tail,
                    cgm::ExperimentKind::exit, cgm::ExperimentKind::busemann, cgm::ExperimentKind::cif}) {
    auto* cmd = experiment->add_subcommand(cgm::to_string(kind));
    add_experiment_flags(cmd, ea);
    add_output_flags(cmd, exp_out);
    cmd->callback([&, kind] { action = [&, kind] { return run_experiment_cmd(kind, ea, exp_out); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cgm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "range error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
