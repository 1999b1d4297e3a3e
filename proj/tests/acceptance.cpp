// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Optional arguments select criteria by
// number, e.g. `cgm_acceptance 2 4 13`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cgm/analytic.hpp"
#include "cgm/bounds.hpp"
#include "cgm/config.hpp"
#include "cgm/lattice.hpp"
#include "cgm/lpp.hpp"
#include "cgm/mc.hpp"
#include "cgm/parallel.hpp"
#include "cgm/report.hpp"

using namespace cgm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string report;  // canonical bytes compared by the reproducibility criterion
};

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------------
// 1. Analytic identities.

struct MaxError {
  double worst = 0.0;
  std::size_t failures = 0;
  void record(double err, double tol) {
    worst = std::max(worst, err);
    if (!(err <= tol)) ++failures;
  }
};

Outcome analytic_identities(unsigned) {
  constexpr int kChecks = 10000;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto direction = [&] {
    for (;;) {
      const double x = std::exp(std::log(0.1) + unit(rng) * std::log(100.0));
      const double y = std::exp(std::log(0.1) + unit(rng) * std::log(100.0));
      const Direction d(x, y);
      if (d.in_cone(0.1)) return d;
    }
  };
  const auto open = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  MaxError shape_id, quad, zeta_eq, zeta_gap, xi_level, xi_order, ext, duality, conv_a, conv_b, conv_ineq;
  for (int k = 0; k < kChecks; ++k) {
    const Direction d = direction();
    const auto ch = characteristic(d);

    // M^z - gamma = (z - zeta)^2 gamma / (z (1 - z)).
    {
      const double z = open(0.01, 0.99);
      const double lhs = mean_M(z, d) - ch.gamma;
      const double rhs = (z - ch.zeta) * (z - ch.zeta) * ch.gamma / (z * (1.0 - z));
      shape_id.record(std::abs(lhs - rhs) / mean_M(z, d), 1e-10);
    }
    // L^{w,z} against quadrature of M^t.
    {
      double a = open(0.01, 0.99), b = open(0.01, 0.99);
      if (a < b) std::swap(a, b);
      double err = 0.0;
      const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double t) { return mean_M(t, d); }, b, a, 10, 1e-13, &err);
      const double L = lmgf_line_L({a, b}, d);
      quad.record(std::abs(L - integral) / std::max(std::abs(L), 1e-300), 1e-8);
    }
    // Balanced pair.
    {
      const double lambda = open(0.001, 0.999);
      const auto [zp, zm] = balanced_pair_zeta_pm(lambda, d);
      const double mp = mean_M(zp, d);
      zeta_eq.record(std::abs(mp - mean_M(zm, d)) / mp, 1e-10);
      zeta_gap.record(std::abs((zp - zm) - lambda), 1e-12);
    }
    // Level pair and the equivalence of the two parametrizations.
    {
      const double s = ch.gamma * (1.0 + open(0.001, 2.0));
      const auto [xp, xm] = level_pair_xi_pm(s, d);
      xi_level.record(std::max(std::abs(mean_M(xp, d) - s), std::abs(mean_M(xm, d) - s)) / s, 1e-10);
      xi_order.record((xm < ch.zeta && ch.zeta < xp) ? 0.0 : 1.0, 0.0);
      const auto [zp, zm] = balanced_pair_zeta_pm(xp - xm, d);
      ext.record(std::max(std::abs(zp - xp), std::abs(zm - xm)), 1e-10);

      // Duality: rate = sup over lambda of lambda s - envelope(lambda), on a 10^4 grid.
      if (k % 4 == 0) {
        double best = 0.0;
        for (int g = 0; g < 10000; ++g) {
          const double lambda = g / 10000.0;
          const ExtendedReal env = lmgf_envelope({s, lambda, 1.0, 0.0}, d);
          if (env.is_finite()) best = std::max(best, lambda * s - env.value());
        }
        const double rate = rate_bulk(s, d);
        duality.record(std::abs(rate - best) / std::max(1.0, rate), 1e-5);
      }
    }
    // Restricted duality at the stated optimal lambda, and the inequality elsewhere.
    {
      const double w_cap = open(0.05, 1.0);
      const double z_floor = open(0.0, 0.95);
      const double gh = restricted_shape_hor(d, w_cap);
      const double gv = restricted_shape_ver(d, z_floor);
      const double s = std::max(gh, gv) * (1.0 + open(0.001, 2.0));
      const auto [xp, xm] = level_pair_xi_pm(s, d);
      const double scale = std::max(1.0, s);

      const double lam_h = std::min(w_cap, xp) - xm;
      const double i_h = rate_restricted(s, d, w_cap, z_floor, Side::horizontal);
      const double l_h = lmgf_envelope({s, lam_h, w_cap, z_floor}, d, Side::horizontal).value();
      conv_a.record(std::abs(i_h + l_h - lam_h * s) / scale, 1e-9);

      const double lam_v = xp - std::max(z_floor, xm);
      const double i_v = rate_restricted(s, d, w_cap, z_floor, Side::vertical);
      const double l_v = lmgf_envelope({s, lam_v, w_cap, z_floor}, d, Side::vertical).value();
      conv_b.record(std::abs(i_v + l_v - lam_v * s) / scale, 1e-9);

      const double lam = open(0.0, 1.0);
      const double env_h = lmgf_envelope({s, lam, w_cap, z_floor}, d, Side::horizontal).as_double();
      const double env_v = lmgf_envelope({s, lam, w_cap, z_floor}, d, Side::vertical).as_double();
      const double slack = std::min(i_h + env_h - lam * s, i_v + env_v - lam * s);
      conv_ineq.record(slack < -1e-9 * scale ? 1.0 : 0.0, 0.0);
    }
  }
  const std::vector<std::pair<const char*, const MaxError*>> parts{
      {"shape_identity", &shape_id}, {"quadrature", &quad},     {"zeta_pm_equal_M", &zeta_eq},
      {"zeta_pm_gap", &zeta_gap},    {"xi_pm_level", &xi_level}, {"xi_pm_order", &xi_order},
      {"equivalence", &ext},         {"duality", &duality},      {"restricted_hor", &conv_a},
      {"restricted_ver", &conv_b},   {"restricted_ineq", &conv_ineq}};
  Outcome o;
  o.pass = true;
  std::ostringstream detail;
  for (const auto& [name, e] : parts) {
    o.pass = o.pass && e->failures == 0;
    detail << name << "=" << fmt(e->worst) << (e->failures ? "(FAIL)" : "") << " ";
    o.report += std::string(name) + " " + fmt(e->worst) + " " + std::to_string(e->failures) + "\n";
  }
  o.detail = detail.str();
  return o;
}

// ---------------------------------------------------------------------------
// Experiments driven through the configuration layer.

Report experiment(ExperimentKind kind, KeyValues kv, unsigned workers) {
  kv["workers"] = std::to_string(workers);
  return run_experiment(build_config(kind, kv));
}

std::string describe_checks(const Report& r) {
  std::string out;
  for (const auto& c : r.checks) out += c.name + "=" + fmt(c.value) + (c.pass ? " " : "(FAIL) ");
  return out;
}

Outcome rains(unsigned workers) {
  const Report r = experiment(ExperimentKind::rains,
                              {{"m", "8"}, {"n", "8"}, {"w", "0.4"}, {"z", "0.6"}, {"reps", "1000000"}, {"seed", "1"}},
                              workers);
  const double analytic = r.results["analytic"].get<double>();
  const bool analytic_ok = std::abs(analytic - 16.0 * std::log(2.0 / 3.0)) <= 1e-12;
  return {r.pass() && analytic_ok,
          "mc=" + fmt(r.results["mc_log_mgf"].get<double>()) + " analytic=" + fmt(analytic) +
              " se=" + fmt(r.results["std_error"].get<double>()) + " " + describe_checks(r),
          r.to_json()};
}

Outcome burke(unsigned workers) {
  const Report r = experiment(ExperimentKind::burke, {{"m", "200"}, {"n", "200"}, {"z", "0.5"}, {"reps", "25"}, {"seed", "1"}},
                              workers);
  const double ks = r.results["row_increments"]["distance"].get<double>();
  const double rho = r.results["lag1_correlation"].get<double>();
  const auto n = r.results["lag1_samples"].get<std::size_t>();
  const bool pass = ks <= 0.115 && std::abs(rho) <= 0.03 && n == 10000;
  return {pass, "row KS=" + fmt(ks) + " (<= 0.115) lag1=" + fmt(rho) + " (n=" + std::to_string(n) + ", |rho| <= 0.03)",
          r.to_json()};
}

Outcome crossing(unsigned) {
  const auto res = crossing_fuzz(7, 10000, 6);
  return {res.violations.empty() && res.grids == 10000,
          std::to_string(res.grids) + " grids, " + std::to_string(res.violations.size()) + " violations",
          std::to_string(res.grids) + " " + std::to_string(res.violations.size()) + "\n"};
}

Outcome reflection(unsigned) {
  std::size_t pairs = 0, bad = 0;
  for (const auto& [w, z] : {std::pair{0.5, 0.5}, std::pair{0.3, 0.7}}) {
    for (std::uint64_t r = 0; r < 100; ++r) {
      const auto res = northeast_reflection_check({1, r}, w, z, 4, 4);
      pairs += res.pairs_checked;
      bad += res.mismatches;
    }
  }
  return {bad == 0 && pairs > 0, std::to_string(pairs) + " start/end pairs, " + std::to_string(bad) + " mismatches",
          std::to_string(pairs) + " " + std::to_string(bad) + "\n"};
}

// ---------------------------------------------------------------------------
// 6. Exhaustive path enumeration.

struct BestPath {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<Vertex> path;
};

template <class W>
void enumerate_paths(const W& w, Vertex cur, Vertex end, double acc, std::vector<Vertex>& stack, BestPath& best) {
  acc += w(cur.i, cur.j);
  stack.push_back(cur);
  if (cur == end) {
    if (acc > best.value) best = {acc, stack};
  } else {
    if (cur.i < end.i) enumerate_paths(w, {cur.i + 1, cur.j}, end, acc, stack, best);
    if (cur.j < end.j) enumerate_paths(w, {cur.i, cur.j + 1}, end, acc, stack, best);
  }
  stack.pop_back();
}

template <class W>
BestPath brute(const W& w, Vertex start, Vertex end) {
  BestPath best;
  std::vector<Vertex> stack;
  enumerate_paths(w, start, end, 0.0, stack, best);
  return best;
}

Outcome brute_force(unsigned) {
  constexpr double kTol = 1e-10;
  std::size_t compared = 0, mismatches = 0;
  const auto cmp = [&](double a, double b) {
    ++compared;
    if (!(std::abs(a - b) <= kTol)) ++mismatches;
  };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const WeightField bulk = WeightField::bulk({3, seed});
    const WeightField bd = WeightField::boundary({3, seed}, 0.4, 0.6);
    for (Coord m = 1; m <= 5; ++m) {
      for (Coord n = 1; n <= 5; ++n) {
        const PassageGrid fwd = solve_bulk(bulk, {1, 1}, {m, n});
        const PassageGrid rev = solve_reverse_bulk(bulk, {m, n});
        for (Coord i = 1; i <= m; ++i) {
          for (Coord j = 1; j <= n; ++j) {
            cmp(fwd(i, j), brute(bulk, {1, 1}, {i, j}).value);
            cmp(rev(i, j), brute(bulk, {i, j}, {m, n}).value);
          }
        }
        const BestPath bp = brute(bulk, {1, 1}, {m, n});
        ++compared;
        if (geodesic(fwd).vertices != bp.path) ++mismatches;

        // Boundary grids on [0, m-1] x [0, n-1] stay within 5 x 5.
        const Coord bm = m - 1, bn = n - 1;
        const PassageGrid bgrid = solve_boundary(bd, {bm, bn});
        for (Coord i = 0; i <= bm; ++i) {
          for (Coord j = 0; j <= bn; ++j) cmp(bgrid(i, j), brute(bd, {0, 0}, {i, j}).value);
        }
        if (bm >= 1 && bn >= 1) {
          const BestPath bb = brute(bd, {0, 0}, {bm, bn});
          ++compared;
          if (geodesic(bgrid).vertices != bb.path) ++mismatches;
          // Definitional exit points: largest k (resp. l) whose decomposition attains the maximum.
          const double total = bb.value;
          Coord zh = 0, zv = 0;
          for (Coord k = 1; k <= bm; ++k) {
            const double v = brute(bd, {0, 0}, {k, 0}).value + brute(bd, {k, 1}, {bm, bn}).value;
            if (std::abs(v - total) <= kTol) zh = k;
          }
          for (Coord l = 1; l <= bn; ++l) {
            const double v = brute(bd, {0, 0}, {0, l}).value + brute(bd, {1, l}, {bm, bn}).value;
            if (std::abs(v - total) <= kTol) zv = l;
          }
          ++compared;
          const ExitPair e = exit_points(bgrid);
          if (!(e == ExitPair{zh, zv})) ++mismatches;
          RollingScratch scratch;
          ++compared;
          if (!(boundary_value_exit(bd, {bm, bn}, scratch).exit == e)) ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0, std::to_string(compared) + " comparisons, " + std::to_string(mismatches) + " mismatches",
          std::to_string(compared) + " " + std::to_string(mismatches) + "\n"};
}

// ---------------------------------------------------------------------------
// 7. Shape limit.

Outcome shape_limit(unsigned workers) {
  constexpr Coord N = 1000;
  const auto vals = map_replicates<double>(100, workers, [](std::uint64_t r, RollingScratch& scratch) {
    return lpp_value(WeightField::bulk({1, r}), {1, 1}, {N, N}, scratch) / static_cast<double>(N);
  });
  const double mu = mean(vals);
  std::string report;
  for (double v : vals) report += fmt(v) + "\n";
  report += "mean " + fmt(mu) + "\n";
  return {mu >= 3.90 && mu <= 4.00, "mean G(N,N)/N = " + fmt(mu) + " (N=1000, 100 reps, want [3.90, 4.00])", report};
}

// ---------------------------------------------------------------------------

Outcome tails(unsigned workers) {
  const Report bulk = experiment(ExperimentKind::tail, {{"model", "bulk"}, {"reps", "100000"}, {"seed", "1"}}, workers);
  const Report stat = experiment(ExperimentKind::tail, {{"model", "stationary"}, {"reps", "100000"}, {"seed", "1"}}, workers);
  const auto slope = [](const Report& r) {
    return r.results["fit"].is_null() ? std::string("none") : fmt(r.results["fit"]["slope"].get<double>());
  };
  return {bulk.pass() && stat.pass(),
          "bulk slope=" + slope(bulk) + " [1.05,1.70], stationary slope=" + slope(stat) + " [0.50,0.90]; " +
              describe_checks(bulk),
          bulk.to_json() + stat.to_json()};
}

Outcome exits(unsigned workers) {
  const Report r = experiment(ExperimentKind::exit,
                              {{"m", "100"},
                               {"n", "100"},
                               {"z", "0.5"},
                               {"s_grid", "0.5,1.0,1.5"},
                               {"reps", "100000"},
                               {"sizes", "64,128,256"},
                               {"scaling_reps", "10000"},
                               {"quantile", "0.9"},
                               {"seed", "1"}},
                              workers);
  std::string q;
  for (const auto& p : r.results["scaling"]) {
    q += std::to_string(p["size"].get<Coord>()) + ":" + fmt(p["quantile"].get<double>()) + " ";
  }
  std::string ps;
  for (const auto& t : r.results["table"]) ps += fmt(t["p_hat"].get<double>()) + " ";
  return {r.pass(), "p_hat=" + ps + "quantiles " + q + describe_checks(r), r.to_json()};
}

Outcome cif(unsigned workers) {
  const Report r = experiment(ExperimentKind::cif,
                              {{"n", "2000"}, {"x_grid", "0.25,0.5"}, {"reps", "20000"}, {"seed", "1"}}, workers);
  std::string ps;
  for (const auto& t : r.results["table"]) {
    ps += "x=" + fmt(t["x"].get<double>()) + ":" + fmt(t["p_hat"].get<double>()) + " ";
  }
  return {r.pass(), ps + describe_checks(r), r.to_json()};
}

Outcome busemann(unsigned workers) {
  const auto run = [&](const char* size) {
    return experiment(ExperimentKind::busemann,
                      {{"m", size}, {"n", size}, {"k", "1"}, {"l", "1"}, {"reps", "10000"}, {"seed", "1"}}, workers);
  };
  const Report big = run("500");
  const Report small = run("50");
  const double ks_big = big.results["hor_1_1"]["distance"].get<double>();
  const double ks_small = small.results["hor_1_1"]["distance"].get<double>();
  return {ks_big <= 0.1 && ks_big <= ks_small,
          "KS(500)=" + fmt(ks_big) + " (<= 0.1) KS(50)=" + fmt(ks_small) + " (want KS(500) <= KS(50))",
          big.to_json() + small.to_json()};
}

Outcome bounds(unsigned) {
  const auto grid = default_appendix_grid();
  const auto res = check_appendix_bounds(grid);
  return {res.ok() && grid.size() == 1000,
          std::to_string(grid.size()) + " parameter points, " + std::to_string(res.checked) + " evaluations, " +
              std::to_string(res.violations.size()) + " violations, " + std::to_string(res.nonconverged.size()) +
              " nonconverged",
          std::to_string(res.checked) + " " + std::to_string(res.violations.size()) + " " +
              std::to_string(res.nonconverged.size()) + "\n"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(unsigned)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "analytic identity suite", analytic_identities},
      {2, "Rains identity", rains},
      {3, "Burke property", burke},
      {4, "crossing inequalities", crossing},
      {5, "northeast reflection", reflection},
      {6, "brute-force oracle equivalence", brute_force},
      {7, "shape limit", shape_limit},
      {8, "moderate-deviation slopes", tails},
      {9, "exit points", exits},
      {10, "competition interface", cif},
      {11, "Busemann convergence", busemann},
      {12, "tail and integral bounds", bounds},
  };
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));
  if (selected == std::set<int>{13}) selected.clear();  // reproducibility needs every report
  const auto wanted = [&](int id) { return selected.empty() || selected.contains(id); };

  int failures = 0;
  std::vector<std::pair<int, std::string>> reports;
  for (const auto& c : criteria) {
    if (!wanted(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(1);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), ""};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
    reports.emplace_back(c.id, o.report);
  }

  if (wanted(13)) {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t identical = 0;
    std::string differing;
    for (const auto& [id, report] : reports) {
      const auto& c = *std::find_if(criteria.begin(), criteria.end(), [id = id](const Criterion& k) { return k.id == id; });
      std::string again;
      try {
        again = c.run(8).report;
      } catch (const std::exception& e) {
        again = std::string("exception: ") + e.what();
      }
      if (again == report && !report.empty()) {
        ++identical;
      } else {
        differing += " " + std::to_string(id);
      }
    }
    const bool pass = !reports.empty() && differing.empty();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion 13 reproducibility (workers 1 vs 8): %zu/%zu reports byte-identical%s [%.1fs]\n",
                pass ? "PASS" : "FAIL", identical, reports.size(),
                differing.empty() ? "" : ("; differing:" + differing).c_str(), secs);
    failures += !pass;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
