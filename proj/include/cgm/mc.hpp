#pragma once

// Monte Carlo experiments. Replicate r of an experiment with master seed S
// always uses the environment EnvSeed{S, r}; per-replicate results are
// gathered by index and reduced in index order, so every statistic is
// independent of the worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgm/analytic.hpp"
#include "cgm/config.hpp"
#include "cgm/lattice.hpp"
#include "cgm/lpp.hpp"
#include "cgm/parallel.hpp"
#include "cgm/report.hpp"
#include "cgm/stats.hpp"

namespace cgm {

// Acceptance thresholds, recorded verbatim in every report.
namespace thresholds {
inline constexpr double kRainsSe = 3.0;
inline constexpr double kLag1Band = 3.0;  // |rho| <= kLag1Band / sqrt(n)
inline constexpr double kMinHitsForFit = 30;
inline constexpr double kBulkSlopeLo = 1.05;
inline constexpr double kBulkSlopeHi = 1.70;
inline constexpr double kStationarySlopeLo = 0.50;
inline constexpr double kStationarySlopeHi = 0.90;
inline constexpr double kBulkBoundSlack = 1.5;
inline constexpr double kBoundSe = 3.0;
inline constexpr double kExitDecreaseSe = 3.0;
inline constexpr double kExitQuantileSpread = 0.15;
inline constexpr double kBusemannKs = 0.1;
inline constexpr double kBusemannCdf = 0.1;
inline constexpr double kCifSymmetrySe = 3.0;
inline constexpr double kCifTolerance = 0.05;
}  // namespace thresholds

struct Proportion {
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

inline Proportion make_proportion(std::uint64_t hits, std::uint64_t reps, double level) {
  const auto [lo, hi] = wilson_ci(hits, reps, level);
  return {hits, reps, static_cast<double>(hits) / static_cast<double>(reps), lo, hi};
}

struct TailEstimate {
  double s = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::optional<double> analytic_ref;

  bool censored() const noexcept { return hits == 0; }
};

inline TailEstimate make_tail_estimate(double s, std::uint64_t hits, std::uint64_t reps, double level,
                                       std::optional<double> ref = std::nullopt) {
  const Proportion p = make_proportion(hits, reps, level);
  return {s, p.hits, p.reps, p.p_hat, p.ci_lo, p.ci_hi, ref};
}

struct KsReport {
  std::size_t sample_size = 0;
  double distance = 0.0;
  std::string reference;
  double critical_5pct = 0.0;
  double critical_1pct = 0.0;
};

inline KsReport ks_against_exponential(std::span<const double> samples, double rate) {
  KsReport r;
  r.sample_size = samples.size();
  r.distance = ks_statistic(samples, exponential_cdf(rate));
  r.reference = "Exp(" + format_double(rate) + ")";
  r.critical_5pct = ks_critical_5pct(samples.size());
  r.critical_1pct = ks_critical_1pct(samples.size());
  return r;
}

namespace detail {

inline std::string fmt(double v) { return format_double(v); }

inline nlohmann::ordered_json to_json(const KsReport& k) {
  return {{"sample_size", k.sample_size},
          {"distance", json_number(k.distance)},
          {"reference", k.reference},
          {"critical_5pct", json_number(k.critical_5pct)},
          {"critical_1pct", json_number(k.critical_1pct)}};
}

inline nlohmann::ordered_json to_json(const Proportion& p) {
  return {{"hits", p.hits}, {"reps", p.reps}, {"p_hat", json_number(p.p_hat)},
          {"ci_lo", json_number(p.ci_lo)}, {"ci_hi", json_number(p.ci_hi)}};
}

inline nlohmann::ordered_json to_json(const TailEstimate& t) {
  return {{"s", json_number(t.s)},         {"hits", t.hits},
          {"reps", t.reps},                {"p_hat", json_number(t.p_hat)},
          {"ci_lo", json_number(t.ci_lo)}, {"ci_hi", json_number(t.ci_hi)},
          {"analytic_ref", json_number(t.analytic_ref)}, {"censored", t.censored()}};
}

inline std::vector<std::string> csv_row(const TailEstimate& t) {
  return {fmt(t.s), std::to_string(t.hits), std::to_string(t.reps), fmt(t.p_hat), fmt(t.ci_lo), fmt(t.ci_hi),
          t.analytic_ref ? fmt(*t.analytic_ref) : std::string()};
}

inline const std::vector<std::string>& tail_header() {
  static const std::vector<std::string> h{"s", "hits", "reps", "p_hat", "ci_lo", "ci_hi", "analytic_ref"};
  return h;
}

inline Report base_report(const ExperimentConfig& c) {
  Report r;
  r.experiment = to_string(c.kind);
  r.config_text = effective_config_text(c);
  r.config_hash = config_hash(c);
  r.config = config_json(c);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rains identity.

struct RainsResult {
  double mc_log_mgf = 0.0;
  double analytic = 0.0;
  double std_error = 0.0;
  double difference = 0.0;
  bool positive_exponent = false;
  bool pass = false;
};

/// L^{w,z}(m, n), including the degenerate axes m = 0 or n = 0.
inline double lmgf_line_lattice(double w, double z, Coord m, Coord n) {
  detail::require_open_unit(w, "w");
  detail::require_open_unit(z, "z");
  return static_cast<double>(m) * std::log(w / z) + static_cast<double>(n) * std::log((1.0 - z) / (1.0 - w));
}

inline RainsResult run_rains_check(const ExperimentConfig& c) {
  const double theta = c.w - c.z;
  const auto samples = map_replicates<double>(c.reps, c.workers, [&](std::uint64_t r, RollingScratch& scratch) {
    const WeightField field = WeightField::boundary({c.seed, r}, c.w, c.z);
    return std::exp(theta * lpp_value(field, {0, 0}, {c.m, c.n}, scratch));
  });
  RainsResult res;
  const double mu = mean(samples);
  const double sd = samples.size() > 1 ? std::sqrt(variance(samples)) : 0.0;
  res.mc_log_mgf = std::log(mu);
  res.analytic = lmgf_line_lattice(c.w, c.z, c.m, c.n);
  res.std_error = sd / (std::sqrt(static_cast<double>(samples.size())) * mu);
  res.difference = res.mc_log_mgf - res.analytic;
  res.positive_exponent = theta > 0.0;
  res.pass = std::abs(res.difference) <= thresholds::kRainsSe * res.std_error;
  return res;
}

inline Report make_report(const ExperimentConfig& c, const RainsResult& res) {
  using detail::fmt;
  Report r = detail::base_report(c);
  r.results = {{"mc_log_mgf", json_number(res.mc_log_mgf)},
               {"analytic", json_number(res.analytic)},
               {"std_error", json_number(res.std_error)},
               {"difference", json_number(res.difference)}};
  r.checks.push_back({"rains_identity", std::abs(res.difference),
                      "|mc_log_mgf - analytic| <= 3 * std_error = " + fmt(thresholds::kRainsSe * res.std_error), res.pass});
  if (res.positive_exponent) r.warnings.push_back("w > z: the estimator is unbounded and its variance may be infinite");
  r.table.header = {"m", "n", "w", "z", "reps", "mc_log_mgf", "analytic", "std_error", "difference"};
  r.table.rows.push_back({std::to_string(c.m), std::to_string(c.n), fmt(c.w), fmt(c.z), std::to_string(c.reps),
                          fmt(res.mc_log_mgf), fmt(res.analytic), fmt(res.std_error), fmt(res.difference)});
  return r;
}

// ---------------------------------------------------------------------------
// Burke property of the stationary model.

struct BurkeResult {
  KsReport hor;   // row n of replicate 0 against Exp(z)
  KsReport ver;   // column m of replicate 0 against Exp(1-z)
  double lag1 = 0.0;
  std::size_t lag1_samples = 0;
};

/// Standardized increments (rate * increment, Exp(1) under the null) along
/// the staircase from (0, n) of one stationary realization.
inline std::vector<double> staircase_increments(const PassageGrid& grid, double z) {
  const Coord steps = 2 * std::min(grid.hi().i, grid.hi().j);
  const auto path = staircase_path({0, grid.hi().j}, steps);
  auto inc = down_right_increments(grid, path);
  for (std::size_t k = 0; k < inc.size(); ++k) inc[k] *= (k % 2 == 0) ? z : 1.0 - z;
  return inc;
}

inline BurkeResult run_burke_test(const ExperimentConfig& c) {
  struct Sample {
    std::vector<double> row, col, stair;
  };
  const auto samples = map_replicates<Sample>(c.reps, c.workers, [&](std::uint64_t r, RollingScratch&) {
    const PassageGrid g = solve_boundary(WeightField::stationary({c.seed, r}, c.z), {c.m, c.n});
    Sample s;
    if (r == 0) {
      for (Coord i = 1; i <= c.m; ++i) s.row.push_back(g(i, c.n) - g(i - 1, c.n));
      for (Coord j = 1; j <= c.n; ++j) s.col.push_back(g(c.m, j) - g(c.m, j - 1));
    }
    s.stair = staircase_increments(g, c.z);
    return s;
  });
  BurkeResult res;
  res.hor = ks_against_exponential(samples[0].row, c.z);
  res.ver = ks_against_exponential(samples[0].col, 1.0 - c.z);
  std::vector<std::vector<double>> seqs;
  for (const auto& s : samples) {
    res.lag1_samples += s.stair.size();
    seqs.push_back(s.stair);
  }
  res.lag1 = pooled_lag1_correlation(seqs);
  return res;
}

inline Report make_report(const ExperimentConfig& c, const BurkeResult& res) {
  using detail::fmt;
  Report r = detail::base_report(c);
  const double band = thresholds::kLag1Band / std::sqrt(static_cast<double>(res.lag1_samples));
  r.results = {{"row_increments", detail::to_json(res.hor)},
               {"column_increments", detail::to_json(res.ver)},
               {"lag1_correlation", json_number(res.lag1)},
               {"lag1_samples", res.lag1_samples}};
  r.checks.push_back({"row_ks", res.hor.distance, "<= " + fmt(res.hor.critical_1pct) + " (1% critical value)",
                      res.hor.distance <= res.hor.critical_1pct});
  r.checks.push_back({"column_ks", res.ver.distance, "<= " + fmt(res.ver.critical_1pct) + " (1% critical value)",
                      res.ver.distance <= res.ver.critical_1pct});
  r.checks.push_back({"staircase_lag1", std::abs(res.lag1), "<= 3/sqrt(n) = " + fmt(band), std::abs(res.lag1) <= band});
  r.table.header = {"statistic", "sample_size", "value", "critical_1pct"};
  r.table.rows.push_back({"row_ks", std::to_string(res.hor.sample_size), fmt(res.hor.distance), fmt(res.hor.critical_1pct)});
  r.table.rows.push_back({"column_ks", std::to_string(res.ver.sample_size), fmt(res.ver.distance), fmt(res.ver.critical_1pct)});
  r.table.rows.push_back({"staircase_lag1", std::to_string(res.lag1_samples), fmt(res.lag1), fmt(band)});
  return r;
}

// ---------------------------------------------------------------------------
// Right-tail experiments.

struct TailResult {
  TailModel model = TailModel::bulk;
  CharacteristicData characteristic{};
  double z = 0.0;  // stationary boundary parameter; unused for bulk
  std::vector<TailEstimate> table;
  std::optional<LinearFit> fit;
};

/// Last-passage value of each replicate: G(m, n) from (1, 1) for bulk,
/// the boundary value from (0, 0) for stationary.
inline std::vector<double> simulate_tail_values(const ExperimentConfig& c) {
  return map_replicates<double>(c.reps, c.workers, [&](std::uint64_t r, RollingScratch& scratch) {
    if (c.model == TailModel::bulk) {
      return lpp_value(WeightField::bulk({c.seed, r}), {1, 1}, {c.m, c.n}, scratch);
    }
    return lpp_value(WeightField::stationary({c.seed, r}, c.z), {0, 0}, {c.m, c.n}, scratch);
  });
}

/// Replicate indices with value >= threshold, ascending.
inline std::vector<std::uint64_t> hit_indices(std::span<const double> values, double threshold) {
  std::vector<std::uint64_t> out;
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (values[r] >= threshold) out.push_back(r);
  }
  return out;
}

inline double tail_threshold(const CharacteristicData& ch, double s) { return ch.gamma + ch.sigma * s; }

/// Slope of -log p against s^{3/2} by weighted least squares over levels
/// with enough hits; nullopt when fewer than two levels qualify.
inline std::optional<LinearFit> fit_tail_slope(std::span<const TailEstimate> table) {
  std::vector<double> x, y, w;
  for (const auto& t : table) {
    if (t.hits < thresholds::kMinHitsForFit || t.p_hat >= 1.0) continue;
    x.push_back(std::pow(t.s, 1.5));
    y.push_back(-std::log(t.p_hat));
    w.push_back(static_cast<double>(t.hits) * (1.0 - t.p_hat));
  }
  if (x.size() < 2 || std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end()) return std::nullopt;
  return weighted_linear_fit(x, y, w);
}

inline TailResult tabulate_tail(const ExperimentConfig& c, std::span<const double> values) {
  TailResult res;
  res.model = c.model;
  res.characteristic = characteristic(Direction(static_cast<double>(c.m), static_cast<double>(c.n)));
  res.z = c.z;
  const double rate = c.model == TailModel::bulk ? 4.0 / 3.0 : 2.0 / 3.0;
  for (double s : c.s_grid) {
    const double t = tail_threshold(res.characteristic, s);
    const auto hits = static_cast<std::uint64_t>(std::count_if(values.begin(), values.end(), [t](double v) { return v >= t; }));
    res.table.push_back(make_tail_estimate(s, hits, values.size(), c.level, -rate * std::pow(s, 1.5)));
  }
  res.fit = fit_tail_slope(res.table);
  return res;
}

inline TailResult run_tail_experiment(const ExperimentConfig& c) { return tabulate_tail(c, simulate_tail_values(c)); }

/// Smallest margin of -log p + 3 SE - ((4/3) s^{3/2} - slack) over uncensored levels.
inline double bulk_bound_margin(std::span<const TailEstimate> table) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& t : table) {
    if (t.censored()) continue;
    const double se = std::sqrt((1.0 - t.p_hat) / static_cast<double>(t.hits));
    const double lhs = -std::log(t.p_hat) + thresholds::kBoundSe * se;
    margin = std::min(margin, lhs - (4.0 / 3.0 * std::pow(t.s, 1.5) - thresholds::kBulkBoundSlack));
  }
  return margin;
}

inline Report make_report(const ExperimentConfig& c, const TailResult& res) {
  using detail::fmt;
  Report r = detail::base_report(c);
  auto table = nlohmann::ordered_json::array();
  for (const auto& t : res.table) table.push_back(detail::to_json(t));
  r.results["model"] = to_string(res.model);
  r.results["gamma"] = json_number(res.characteristic.gamma);
  r.results["sigma"] = json_number(res.characteristic.sigma);
  r.results["table"] = std::move(table);
  if (res.fit) {
    r.results["fit"] = {{"slope", json_number(res.fit->slope)},
                        {"intercept", json_number(res.fit->intercept)},
                        {"points", res.fit->points}};
  } else {
    r.results["fit"] = nullptr;
  }
  const bool bulk = res.model == TailModel::bulk;
  const double lo = bulk ? thresholds::kBulkSlopeLo : thresholds::kStationarySlopeLo;
  const double hi = bulk ? thresholds::kBulkSlopeHi : thresholds::kStationarySlopeHi;
  const double slope = res.fit ? res.fit->slope : std::numeric_limits<double>::quiet_NaN();
  r.checks.push_back({"slope", slope, "in [" + fmt(lo) + ", " + fmt(hi) + "] over levels with >= 30 hits",
                      res.fit && slope >= lo && slope <= hi});
  if (bulk) {
    const double margin = bulk_bound_margin(res.table);
    r.checks.push_back({"upper_bound_margin", margin, "-log p_hat + 3 SE - ((4/3) s^1.5 - 1.5) >= 0 at every level",
                        margin >= 0.0});
  }
  r.table.header = detail::tail_header();
  for (const auto& t : res.table) r.table.rows.push_back(detail::csv_row(t));
  return r;
}

// ---------------------------------------------------------------------------
// Exit points of the stationary model.

struct ExitScalePoint {
  Coord size = 0;
  double quantile = 0.0;
  std::size_t ties = 0;
};

struct ExitResult {
  double scale = 0.0;  // (m + n)^{2/3}
  std::vector<TailEstimate> table;
  Proportion ver_positive;
  Proportion hor_positive;
  double quantile = 0.0;  // of max(Z)/(m+n)^{2/3} at (m, n)
  std::size_t ties = 0;
  std::vector<ExitScalePoint> scaling;
  double quantile_spread = 0.0;  // (max - min) / min over `scaling`
};

inline std::vector<BoundarySolve> simulate_exits(std::uint64_t seed, std::uint64_t reps, unsigned workers, double z,
                                                 Coord m, Coord n) {
  return map_replicates<BoundarySolve>(reps, workers, [&](std::uint64_t r, RollingScratch& scratch) {
    return boundary_value_exit(WeightField::stationary({seed, r}, z), {m, n}, scratch);
  });
}

inline double exit_max(const BoundarySolve& b) { return static_cast<double>(std::max(b.exit.z_hor, b.exit.z_ver)); }

inline ExitResult run_exit_experiment(const ExperimentConfig& c) {
  ExitResult res;
  res.scale = std::pow(static_cast<double>(c.m + c.n), 2.0 / 3.0);
  const auto exits = simulate_exits(c.seed, c.reps, c.workers, c.z, c.m, c.n);
  std::uint64_t ver = 0, hor = 0;
  std::vector<double> scaled;
  for (const auto& e : exits) {
    ver += e.exit.z_ver > 0;
    hor += e.exit.z_hor > 0;
    res.ties += e.ties;
    scaled.push_back(exit_max(e) / res.scale);
  }
  for (double s : c.s_grid) {
    const double t = s * res.scale;
    const auto hits = static_cast<std::uint64_t>(
        std::count_if(exits.begin(), exits.end(), [t](const BoundarySolve& e) { return exit_max(e) >= t; }));
    res.table.push_back(make_tail_estimate(s, hits, c.reps, c.level));
  }
  res.ver_positive = make_proportion(ver, c.reps, c.level);
  res.hor_positive = make_proportion(hor, c.reps, c.level);
  res.quantile = empirical_quantile(scaled, c.quantile);
  for (Coord size : c.sizes) {
    const auto ex = simulate_exits(c.seed, c.scaling_reps, c.workers, 0.5, size, size);
    const double sc = std::pow(2.0 * static_cast<double>(size), 2.0 / 3.0);
    ExitScalePoint p;
    p.size = size;
    std::vector<double> v;
    for (const auto& e : ex) {
      v.push_back(exit_max(e) / sc);
      p.ties += e.ties;
    }
    p.quantile = empirical_quantile(v, c.quantile);
    res.scaling.push_back(p);
  }
  if (!res.scaling.empty()) {
    const auto [lo, hi] = std::minmax_element(res.scaling.begin(), res.scaling.end(),
                                              [](const auto& a, const auto& b) { return a.quantile < b.quantile; });
    res.quantile_spread = lo->quantile > 0.0 ? (hi->quantile - lo->quantile) / lo->quantile
                                             : std::numeric_limits<double>::infinity();
  }
  return res;
}

/// Smallest z-score of p(s_k) - p(s_{k+1}) over consecutive levels with
/// p(s_k) > 0. For nested events the difference is itself a frequency.
inline double exit_decrease_zscore(std::span<const TailEstimate> table) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < table.size(); ++k) {
    if (table[k].hits == 0) continue;
    const double d = table[k].p_hat - table[k + 1].p_hat;
    const double se = std::sqrt(std::max(d * (1.0 - d), 0.0) / static_cast<double>(table[k].reps));
    const double zscore = d <= 0.0 ? (d < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0)
                                   : (se > 0.0 ? d / se : std::numeric_limits<double>::infinity());
    worst = std::min(worst, zscore);
  }
  return worst;
}

inline Report make_report(const ExperimentConfig& c, const ExitResult& res) {
  using detail::fmt;
  Report r = detail::base_report(c);
  auto table = nlohmann::ordered_json::array();
  for (const auto& t : res.table) table.push_back(detail::to_json(t));
  auto scaling = nlohmann::ordered_json::array();
  for (const auto& p : res.scaling) {
    scaling.push_back({{"size", p.size}, {"quantile", json_number(p.quantile)}, {"ties", p.ties}});
  }
  r.results = {{"scale", json_number(res.scale)},
               {"table", std::move(table)},
               {"ver_positive", detail::to_json(res.ver_positive)},
               {"hor_positive", detail::to_json(res.hor_positive)},
               {"quantile", json_number(res.quantile)},
               {"ties", res.ties},
               {"scaling", std::move(scaling)},
               {"quantile_spread", json_number(res.quantile_spread)}};
  const double zmin = exit_decrease_zscore(res.table);
  r.checks.push_back({"strictly_decreasing", zmin,
                      "p_hat(s_k) - p_hat(s_k+1) > 3 SE for consecutive levels with p_hat(s_k) > 0",
                      zmin > thresholds::kExitDecreaseSe});
  if (!res.scaling.empty()) {
    r.checks.push_back({"quantile_spread", res.quantile_spread,
                        "(max - min) / min of the scaled quantiles < " + fmt(thresholds::kExitQuantileSpread),
                        res.quantile_spread < thresholds::kExitQuantileSpread});
  }
  if (res.ties > 0) r.warnings.push_back("exact ties met during exit tracking: " + std::to_string(res.ties));
  r.table.header = detail::tail_header();
  for (const auto& t : res.table) r.table.rows.push_back(detail::csv_row(t));
  return r;
}

// ---------------------------------------------------------------------------
// Busemann increments.

struct BusemannRow {
  std::string variant;  // "hor" or "ver"
  double u = 0.0;       // common threshold for every s_i and t_j
  Proportion estimate;
  double analytic = 0.0;
};

struct BusemannResult {
  double zeta = 0.0;
  std::vector<BusemannRow> rows;
  KsReport hor11;
  KsReport ver11;
  double max_deviation = 0.0;
};

inline BusemannResult run_busemann_experiment(const ExperimentConfig& c) {
  const Coord kk = std::max<Coord>(c.k, 1);
  const Coord ll = std::max<Coord>(c.l, 1);
  const auto samples = map_replicates<BusemannSample>(c.reps, c.workers, [&](std::uint64_t r, RollingScratch& scratch) {
    return busemann_rolling(WeightField::bulk({c.seed, r}), {c.m, c.n}, kk, ll, scratch);
  });
  BusemannResult res;
  res.zeta = shape_zeta(Direction(static_cast<double>(c.m), static_cast<double>(c.n)));
  std::vector<double> h11, v11;
  for (const auto& s : samples) {
    h11.push_back(s.hor[0]);
    v11.push_back(s.ver[0]);
  }
  res.hor11 = ks_against_exponential(h11, res.zeta);
  res.ver11 = ks_against_exponential(v11, 1.0 - res.zeta);

  for (const char* variant : {"hor", "ver"}) {
    const bool hor = variant[0] == 'h';
    for (double u : c.s_grid) {
      std::uint64_t hits = 0;
      for (const auto& s : samples) {
        bool ok = true;
        for (Coord i = 0; i < c.k && ok; ++i) ok = hor ? s.hor[i] > u : s.hor[i] <= u;
        for (Coord j = 0; j < c.l && ok; ++j) ok = hor ? s.ver[j] <= u : s.ver[j] > u;
        hits += ok;
      }
      const std::vector<double> sv(static_cast<std::size_t>(c.k), u);
      const std::vector<double> tv(static_cast<std::size_t>(c.l), u);
      BusemannRow row{variant, u, make_proportion(hits, c.reps, c.level),
                      boundary_cdf(res.zeta, sv, tv, hor ? CdfVariant::hor : CdfVariant::ver)};
      res.max_deviation = std::max(res.max_deviation, std::abs(row.estimate.p_hat - row.analytic));
      res.rows.push_back(std::move(row));
    }
  }
  return res;
}

inline Report make_report(const ExperimentConfig& c, const BusemannResult& res) {
  using detail::fmt;
  Report r = detail::base_report(c);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : res.rows) {
    auto j = detail::to_json(row.estimate);
    j["variant"] = row.variant;
    j["u"] = json_number(row.u);
    j["analytic"] = json_number(row.analytic);
    rows.push_back(std::move(j));
  }
  r.results = {{"zeta", json_number(res.zeta)},
               {"hor_1_1", detail::to_json(res.hor11)},
               {"ver_1_1", detail::to_json(res.ver11)},
               {"cdf_table", std::move(rows)},
               {"max_deviation", json_number(res.max_deviation)}};
  r.checks.push_back({"hor_1_1_ks", res.hor11.distance, "<= " + fmt(thresholds::kBusemannKs),
                      res.hor11.distance <= thresholds::kBusemannKs});
  r.checks.push_back({"cdf_deviation", res.max_deviation, "max |F_hat - f| <= " + fmt(thresholds::kBusemannCdf),
                      res.max_deviation <= thresholds::kBusemannCdf});
  r.table.header = {"variant", "u", "hits", "reps", "p_hat", "ci_lo", "ci_hi", "analytic_ref"};
  for (const auto& row : res.rows) {
    r.table.rows.push_back({row.variant, fmt(row.u), std::to_string(row.estimate.hits), std::to_string(row.estimate.reps),
                            fmt(row.estimate.p_hat), fmt(row.estimate.ci_lo), fmt(row.estimate.ci_hi), fmt(row.analytic)});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Competition interface.

struct CifRow {
  double x = 0.0;
  Proportion estimate;
  double analytic = 0.0;
};

struct CifResult {
  std::vector<CifRow> rows;
  std::size_t ties = 0;
};

inline CifResult run_cif_experiment(const ExperimentConfig& c) {
  struct Sample {
    Coord phi_hor = 0;
    std::size_t ties = 0;
  };
  const auto samples = map_replicates<Sample>(c.reps, c.workers, [&](std::uint64_t r, RollingScratch&) {
    const CifPath p = competition_interface(WeightField::bulk({c.seed, r}), c.n);
    return Sample{p.phi.back().i, p.ties};
  });
  CifResult res;
  for (const auto& s : samples) res.ties += s.ties;
  for (double x : c.x_grid) {
    const double cut = static_cast<double>(c.n) * x;
    const auto hits = static_cast<std::uint64_t>(
        std::count_if(samples.begin(), samples.end(), [cut](const Sample& s) { return static_cast<double>(s.phi_hor) <= cut; }));
    res.rows.push_back({x, make_proportion(hits, c.reps, c.level), cif_limit_cdf(x)});
  }
  return res;
}

inline Report make_report(const ExperimentConfig& c, const CifResult& res) {
  using detail::fmt;
  Report r = detail::base_report(c);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : res.rows) {
    auto j = detail::to_json(row.estimate);
    j["x"] = json_number(row.x);
    j["analytic"] = json_number(row.analytic);
    rows.push_back(std::move(j));
  }
  r.results = {{"table", std::move(rows)}, {"ties", res.ties}};
  for (const auto& row : res.rows) {
    const double dev = std::abs(row.estimate.p_hat - row.analytic);
    if (row.x == 0.5 && c.n % 2 == 0) {
      const double se = std::sqrt(0.25 / static_cast<double>(c.reps));
      r.checks.push_back({"symmetry_x_0.5", dev, "|p_hat - 0.5| <= 3 SE = " + fmt(thresholds::kCifSymmetrySe * se),
                          dev <= thresholds::kCifSymmetrySe * se});
    } else {
      r.checks.push_back({"limit_x_" + fmt(row.x), dev, "|p_hat - limit| <= " + fmt(thresholds::kCifTolerance),
                          dev <= thresholds::kCifTolerance});
    }
  }
  if (res.ties > 0) r.warnings.push_back("exact ties met along the interface: " + std::to_string(res.ties));
  r.table.header = {"x", "hits", "reps", "p_hat", "ci_lo", "ci_hi", "analytic_ref"};
  for (const auto& row : res.rows) {
    r.table.rows.push_back({fmt(row.x), std::to_string(row.estimate.hits), std::to_string(row.estimate.reps),
                            fmt(row.estimate.p_hat), fmt(row.estimate.ci_lo), fmt(row.estimate.ci_hi), fmt(row.analytic)});
  }
  return r;
}

// ---------------------------------------------------------------------------

/// Runs the configured experiment and assembles its report.
inline Report run_experiment(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::rains: return make_report(c, run_rains_check(c));
    case ExperimentKind::burke: return make_report(c, run_burke_test(c));
    case ExperimentKind::tail: return make_report(c, run_tail_experiment(c));
    case ExperimentKind::exit: return make_report(c, run_exit_experiment(c));
    case ExperimentKind::busemann: return make_report(c, run_busemann_experiment(c));
    case ExperimentKind::cif: return make_report(c, run_cif_experiment(c));
  }
  throw std::logic_error("run_experiment: unhandled kind");
}

}  // namespace cgm
