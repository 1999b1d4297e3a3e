#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cgm/mc.hpp"

using namespace cgm;

namespace {

ExperimentConfig cfg(ExperimentKind kind, const std::string& text) { return build_config(kind, text); }

}  // namespace

TEST(Parallel, ResultsIndependentOfWorkers) {
  const auto f = [](std::uint64_t r, RollingScratch& s) { return lpp_value(WeightField::bulk({3, r}), {1, 1}, {9, 9}, s); };
  const auto serial = map_replicates<double>(500, 1, f);
  for (unsigned w : {2u, 3u, 8u}) EXPECT_EQ(map_replicates<double>(500, w, f), serial);
  EXPECT_THROW(map_replicates<double>(300, 4, [](std::uint64_t r, RollingScratch&) -> double {
                 if (r == 177) throw std::runtime_error("boom");
                 return 0.0;
               }),
               std::runtime_error);
}

TEST(Parallel, ReportBytesIndependentOfWorkers) {
  auto c = cfg(ExperimentKind::tail, "m = 10\nn = 10\nreps = 2000\ns_grid = 0, 0.5, 1");
  const std::string one = run_experiment(c).to_json();
  c.workers = 4;
  EXPECT_EQ(run_experiment(c).to_json(), one);
  EXPECT_EQ(one.find("wall_seconds"), std::string::npos);
}

TEST(Rains, ZeroExponentIsExact) {
  const auto c = cfg(ExperimentKind::rains, "w = 0.5\nz = 0.5\nreps = 50\nm = 3\nn = 3");
  const auto r = run_rains_check(c);
  EXPECT_EQ(r.mc_log_mgf, 0.0);
  EXPECT_EQ(r.analytic, 0.0);
  EXPECT_EQ(r.std_error, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(Rains, DegenerateAxis) {
  // m = 0: G is a sum of n Exp(1-z) weights, so E exp((w-z)G) = ((1-z)/(1-w))^n.
  EXPECT_NEAR(lmgf_line_lattice(0.3, 0.6, 0, 4), 4 * std::log(0.4 / 0.7), 1e-15);
  const auto c = cfg(ExperimentKind::rains, "m = 0\nn = 4\nw = 0.3\nz = 0.6\nreps = 100000");
  const auto r = run_rains_check(c);
  EXPECT_TRUE(r.pass) << r.difference << " vs SE " << r.std_error;
  EXPECT_LT(r.std_error, 0.01);
}

TEST(Rains, PositiveExponentFlagged) {
  const auto c = cfg(ExperimentKind::rains, "w = 0.55\nz = 0.5\nreps = 1000\nm = 2\nn = 2\nallow_positive_exponent = true");
  const auto rep = run_experiment(c);
  EXPECT_TRUE(run_rains_check(c).positive_exponent);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Tail, NestedEventsAndCounts) {
  const auto c = cfg(ExperimentKind::tail, "m = 12\nn = 8\nreps = 3000\ns_grid = -0, 0.5, 1, 1.5, 2");
  const auto values = simulate_tail_values(c);
  const auto res = tabulate_tail(c, values);
  ASSERT_EQ(res.table.size(), 5u);
  for (std::size_t k = 0; k < res.table.size(); ++k) {
    const auto& t = res.table[k];
    const auto idx = hit_indices(values, tail_threshold(res.characteristic, t.s));
    EXPECT_EQ(idx.size(), t.hits);
    EXPECT_EQ(t.p_hat, static_cast<double>(t.hits) / 3000.0);
    EXPECT_LE(t.ci_lo, t.p_hat);
    EXPECT_GE(t.ci_hi, t.p_hat);
    if (k + 1 < res.table.size()) {
      const auto next = hit_indices(values, tail_threshold(res.characteristic, res.table[k + 1].s));
      EXPECT_TRUE(std::includes(idx.begin(), idx.end(), next.begin(), next.end()));
    }
  }
}

TEST(Tail, CensoredLevelsSkippedByFit) {
  std::vector<TailEstimate> t{make_tail_estimate(1.0, 400, 1000, 0.99), make_tail_estimate(2.0, 100, 1000, 0.99),
                              make_tail_estimate(3.0, 10, 1000, 0.99), make_tail_estimate(4.0, 0, 1000, 0.99)};
  EXPECT_TRUE(t[3].censored());
  const auto fit = fit_tail_slope(t);
  ASSERT_TRUE(fit.has_value());
  EXPECT_EQ(fit->points, 2u);
  const double expect = (std::log(0.4) - std::log(0.1)) / (std::pow(2.0, 1.5) - 1.0);
  EXPECT_NEAR(fit->slope, expect, 1e-12);
  t.resize(1);
  EXPECT_FALSE(fit_tail_slope(t).has_value());
  const double m = bulk_bound_margin(std::vector<TailEstimate>{make_tail_estimate(4.0, 0, 10, 0.99)});
  EXPECT_TRUE(std::isinf(m));
}

TEST(Exit, UnreachableLevelHasNoHits) {
  auto c = cfg(ExperimentKind::exit, "m = 20\nn = 20\nreps = 500\ns_grid = 0.1, 100\nsizes = 16\nscaling_reps = 200");
  const auto r = run_exit_experiment(c);
  EXPECT_EQ(r.table.back().hits, 0u);
  EXPECT_EQ(r.ver_positive.hits + r.hor_positive.hits, 500u);
  ASSERT_EQ(r.scaling.size(), 1u);
  EXPECT_GT(exit_decrease_zscore(r.table), 0.0);
}

TEST(Exit, DecreaseZscoreRules) {
  const std::vector<TailEstimate> flat{make_tail_estimate(1, 5, 100, 0.99), make_tail_estimate(2, 5, 100, 0.99)};
  EXPECT_EQ(exit_decrease_zscore(flat), 0.0);
  const std::vector<TailEstimate> up{make_tail_estimate(1, 5, 100, 0.99), make_tail_estimate(2, 6, 100, 0.99)};
  EXPECT_TRUE(std::isinf(exit_decrease_zscore(up)) && exit_decrease_zscore(up) < 0);
  const std::vector<TailEstimate> down{make_tail_estimate(1, 50, 100, 0.99), make_tail_estimate(2, 10, 100, 0.99)};
  EXPECT_NEAR(exit_decrease_zscore(down), 0.4 / std::sqrt(0.24 / 100), 1e-12);
}

TEST(Cif, EndpointsAreExact) {
  const auto c = cfg(ExperimentKind::cif, "n = 40\nreps = 200\nx_grid = 0, 1");
  const auto r = run_cif_experiment(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].estimate.hits, 0u);
  EXPECT_EQ(r.rows[1].estimate.p_hat, 1.0);
}

TEST(Burke, SmallRunIsSane) {
  const auto c = cfg(ExperimentKind::burke, "m = 40\nn = 40\nreps = 5");
  const auto rep = run_experiment(c);
  EXPECT_EQ(rep.experiment, "burke");
  EXPECT_FALSE(rep.checks.empty());
  EXPECT_NE(rep.to_json().find("\"verdict\""), std::string::npos);
}

TEST(Busemann, RowsCoverBothVariants) {
  const auto c = cfg(ExperimentKind::busemann, "m = 30\nn = 30\nreps = 400\ns_grid = 1");
  const auto r = run_busemann_experiment(c);
  bool hor = false, ver = false;
  for (const auto& row : r.rows) {
    hor |= row.variant == "hor";
    ver |= row.variant == "ver";
    EXPECT_GE(row.analytic, 0.0);
    EXPECT_LE(row.analytic, 1.0);
  }
  EXPECT_TRUE(hor && ver);
}

TEST(Report, CsvAndJsonShape) {
  const auto c = cfg(ExperimentKind::tail, "m = 5\nn = 5\nreps = 100\ns_grid = 0, 1");
  const auto rep = run_experiment(c);
  const std::string csv = rep.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "s,hits,reps,p_hat,ci_lo,ci_hi,analytic_ref");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const auto j = nlohmann::json::parse(rep.to_json());
  EXPECT_EQ(j["config_hash"], config_hash(c));
  EXPECT_EQ(j["tool"], "cgm_lab");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(json_number(std::nan("")), nullptr);
}
