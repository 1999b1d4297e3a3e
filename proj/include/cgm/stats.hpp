#pragma once

// Small statistics toolkit for the Monte Carlo harness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace cgm {

/// One-sample Kolmogorov-Smirnov sup-distance to a continuous c.d.f.
inline double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// c.d.f. of Exp(rate).
inline std::function<double(double)> exponential_cdf(double rate) {
  return [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
}

/// Asymptotic KS critical values c(alpha)/sqrt(n).
inline double ks_critical_5pct(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)); }
inline double ks_critical_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

/// Two-sided standard normal quantile for a confidence level, e.g. 0.99 -> 2.5758.
inline double normal_two_sided_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("confidence level must lie in (0,1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
}

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_ci(std::uint64_t hits, std::uint64_t reps, double level) {
  if (reps == 0 || hits > reps) throw std::invalid_argument("wilson_ci: need 0 <= hits <= reps, reps >= 1");
  const double z = normal_two_sided_quantile(level);
  const double n = static_cast<double>(reps);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Clamp the endpoints exactly where the interval must touch them.
  const double lo = hits == 0 ? 0.0 : std::max(0.0, std::min(p, centre - half));
  const double hi = hits == reps ? 1.0 : std::min(1.0, std::max(p, centre + half));
  return {lo, hi};
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("variance: need at least two samples");
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return ss / static_cast<double>(v.size() - 1);
}

/// Lag-1 sample correlation pooled over independent sequences: pairs are
/// formed only within a sequence, moments use the pooled mean.
inline double pooled_lag1_correlation(std::span<const std::vector<double>> sequences) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : sequences) {
    sum += std::accumulate(s.begin(), s.end(), 0.0);
    count += s.size();
  }
  if (count < 2) throw std::invalid_argument("pooled_lag1_correlation: too few samples");
  const double mu = sum / static_cast<double>(count);
  double num = 0.0;
  double den = 0.0;
  std::size_t pairs = 0;
  for (const auto& s : sequences) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      den += (s[k] - mu) * (s[k] - mu);
      if (k + 1 < s.size()) {
        num += (s[k] - mu) * (s[k + 1] - mu);
        ++pairs;
      }
    }
  }
  if (pairs == 0 || den == 0.0) throw std::invalid_argument("pooled_lag1_correlation: degenerate sample");
  return (num / static_cast<double>(pairs)) / (den / static_cast<double>(count));
}

/// Empirical quantile: the smallest sample x with F_n(x) >= q.
inline double empirical_quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("empirical_quantile: q must lie in (0,1]");
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Weighted least squares fit y = intercept + slope * x.
inline LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size()) throw std::invalid_argument("weighted_linear_fit: size mismatch");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  if (x.size() < 2 || !(sw > 0.0)) throw std::invalid_argument("weighted_linear_fit: need two weighted points");
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("weighted_linear_fit: degenerate abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, x.size()};
}

}  // namespace cgm
