#pragma once

// Numerical verification of the Gaussian tail bound and the two-sided
// integral estimate for exp(-f) with f(t) = 2a t^{3/2}/3 - b sqrt(s) (t - s).
// Left-hand integrals are computed by adaptive Gauss-Kronrod quadrature.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cgm {

struct BoundParams {
  double a = 1.0;
  double b = 1.0;
  double s = 1.0;
  double eps = 0.5;  // must satisfy 0 < eps < t0 = b^2 s / a^2
  double x = 1.0;    // Gaussian tail point, x > 0
};

enum class BoundKind { gaussian_tail, integral_below, integral_above };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::gaussian_tail: return "gaussian_tail";
    case BoundKind::integral_below: return "integral_below";
    case BoundKind::integral_above: return "integral_above";
  }
  return "?";
}

struct BoundEvaluation {
  BoundKind kind;
  BoundParams params;
  double lhs;
  double rhs;
  double quad_error;
  bool converged;
  bool holds;
};

struct BoundReport {
  std::size_t checked = 0;
  std::vector<BoundEvaluation> violations;
  std::vector<BoundEvaluation> nonconverged;

  bool ok() const noexcept { return violations.empty() && nonconverged.empty(); }
};

namespace detail {

inline constexpr double kQuadRelTol = 1e-10;
inline constexpr double kConvergedRelError = 1e-7;

template <class F>
BoundEvaluation evaluate_bound(BoundKind kind, const BoundParams& p, F&& integrand, double lo,
                               double hi, double rhs) {
  double err = 0.0;
  const double lhs = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, lo, hi, 15, kQuadRelTol, &err);
  const bool converged = std::isfinite(lhs) && err <= kConvergedRelError * std::max(std::abs(lhs), 1e-300);
  // The quadrature error bar is granted to the left-hand side.
  const bool holds = lhs - err <= rhs * (1.0 + 1e-12);
  return {kind, p, lhs, rhs, err, converged, holds};
}

}  // namespace detail

inline BoundEvaluation check_gaussian_tail(const BoundParams& p) {
  const double x = p.x;
  const double rhs = std::sqrt(std::numbers::pi / 2.0) * std::exp(-x * x / 2.0);
  return detail::evaluate_bound(
      BoundKind::gaussian_tail, p, [](double t) { return std::exp(-t * t / 2.0); }, x,
      std::numeric_limits<double>::infinity(), rhs);
}

inline double integral_estimate_exponent(const BoundParams& p, double t) {
  return 2.0 * p.a * std::pow(t, 1.5) / 3.0 - p.b * std::sqrt(p.s) * (t - p.s);
}

inline BoundEvaluation check_integral_below(const BoundParams& p) {
  const double t0 = p.b * p.b * p.s / (p.a * p.a);
  const double core = -std::pow(p.s, 1.5) * (p.b - p.b * p.b * p.b / (3.0 * p.a * p.a));
  const double rhs = std::sqrt(std::numbers::pi * p.b) * std::pow(p.s, 0.25) / p.a *
                     std::exp(core - p.eps * p.eps * p.a * p.a / (4.0 * p.b * std::sqrt(p.s)));
  return detail::evaluate_bound(
      BoundKind::integral_below, p,
      [&p](double t) { return std::exp(-integral_estimate_exponent(p, t)); }, 0.0, t0 - p.eps, rhs);
}

inline BoundEvaluation check_integral_above(const BoundParams& p) {
  const double t0 = p.b * p.b * p.s / (p.a * p.a);
  const double core = -std::pow(p.s, 1.5) * (p.b - p.b * p.b * p.b / (3.0 * p.a * p.a));
  const double prefactor =
      std::sqrt(2.0 * std::numbers::pi * p.b) * std::pow(p.s, 0.25) / p.a + 1.0 / (p.b * std::sqrt(p.s));
  const double rhs =
      prefactor * std::exp(core - p.eps * p.eps * p.a * p.a / (8.0 * p.b * std::sqrt(p.s)));
  return detail::evaluate_bound(
      BoundKind::integral_above, p,
      [&p](double t) { return std::exp(-integral_estimate_exponent(p, t)); }, t0 + p.eps,
      std::numeric_limits<double>::infinity(), rhs);
}

/// Runs all three checks for every parameter tuple.
inline BoundReport check_appendix_bounds(std::span<const BoundParams> grid) {
  BoundReport report;
  for (const auto& p : grid) {
    const double t0 = p.b * p.b * p.s / (p.a * p.a);
    if (!(p.a > 0 && p.b > 0 && p.s > 0 && p.x > 0 && p.eps > 0 && p.eps < t0)) {
      throw std::domain_error("check_appendix_bounds: parameters out of range");
    }
    for (const auto& ev : {check_gaussian_tail(p), check_integral_below(p), check_integral_above(p)}) {
      ++report.checked;
      if (!ev.converged) {
        report.nonconverged.push_back(ev);
      } else if (!ev.holds) {
        report.violations.push_back(ev);
      }
    }
  }
  return report;
}

/// 10 x 10 x 10 grid over (a, b, s) with eps and x tied to the index so that
/// every tuple is distinct; eps sweeps (0, t0) and x sweeps (0, 5].
inline std::vector<BoundParams> default_appendix_grid() {
  std::vector<BoundParams> grid;
  grid.reserve(1000);
  for (int ia = 0; ia < 10; ++ia) {
    for (int ib = 0; ib < 10; ++ib) {
      for (int is = 0; is < 10; ++is) {
        BoundParams p;
        p.a = 0.5 + 0.15 * ia;
        p.b = 0.5 + 0.15 * ib;
        p.s = 0.1 + 0.5 * is;
        const double t0 = p.b * p.b * p.s / (p.a * p.a);
        const int k = (ia * 7 + ib * 3 + is) % 10;
        p.eps = t0 * (0.05 + 0.09 * k);
        p.x = 0.01 + 0.5 * ((ia + ib + is) % 10);
        grid.push_back(p);
      }
    }
  }
  return grid;
}

}  // namespace cgm
