#pragma once

// Closed-form functions of the exponential corner growth model: the mean
// curve M^z, the shape function and its minimizer, the log-MGF line L^{w,z},
// the tilt/area functional I, the balanced and level pairs, the envelopes
// and rate functions (bulk and boundary-restricted), and a few c.d.f.s.
//
// All functions are pure. Domain violations throw std::domain_error.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace cgm {

/// A direction (x, y) in the open positive quadrant.
class Direction {
 public:
  Direction(double x, double y) : x_(x), y_(y) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw std::domain_error("Direction: coordinates must be positive and finite");
    }
  }

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }

  /// Membership in the cone {x >= delta*y, y >= delta*x}.
  bool in_cone(double delta) const noexcept { return x_ >= delta * y_ && y_ >= delta * x_; }

 private:
  double x_;
  double y_;
};

struct CharacteristicData {
  double gamma;  // shape value (sqrt x + sqrt y)^2
  double zeta;   // minimizer of z -> M^z
  double sigma;  // fluctuation scale, sigma^3 zeta (1 - zeta) = gamma
};

/// Boundary parameters of the two-sided stationary model.
struct ParamPair {
  double w;
  double z;
};

enum class Side { horizontal, vertical, combined };

/// Arguments of the envelope / rate evaluations. `w_cap` restricts the
/// horizontal side, `z_floor` the vertical side.
struct RateQuery {
  double s = 0.0;
  double lambda = 0.0;
  double w_cap = 1.0;
  double z_floor = 0.0;
};

/// Real value that may be +infinity by definition (an infimum over the
/// empty set), kept apart from floating-point overflow.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr explicit ExtendedReal(double v) : value_(v) {}

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  constexpr bool is_finite() const noexcept { return !infinite_; }

  double value() const {
    if (infinite_) throw std::domain_error("ExtendedReal: value of the +infinity sentinel");
    return value_;
  }

  /// +inf for the sentinel, the stored value otherwise.
  constexpr double as_double() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr ExtendedReal max(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_) return a;
    if (b.infinite_) return b;
    return ExtendedReal(std::max(a.value_, b.value_));
  }

  friend constexpr bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

namespace detail {

inline void require_open_unit(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in (0,1), got " + std::to_string(v));
  }
}

inline void require_caps(double w_cap, double z_floor) {
  if (!(w_cap > 0.0 && w_cap <= 1.0)) throw std::domain_error("w_cap must lie in (0,1]");
  if (!(z_floor >= 0.0 && z_floor < 1.0)) throw std::domain_error("z_floor must lie in [0,1)");
}

// acosh(1 + u) for u >= 0, accurate when u is tiny.
inline double acosh1p(double u) { return std::log1p(u + std::sqrt(u * (2.0 + u))); }

}  // namespace detail

/// M^z(x, y) = x/z + y/(1-z).
inline double mean_M(double z, const Direction& d) {
  detail::require_open_unit(z, "z");
  return d.x() / z + d.y() / (1.0 - z);
}

inline double shape_gamma(const Direction& d) {
  const double r = std::sqrt(d.x()) + std::sqrt(d.y());
  return r * r;
}

inline double shape_zeta(const Direction& d) {
  const double sx = std::sqrt(d.x());
  return sx / (sx + std::sqrt(d.y()));
}

inline CharacteristicData characteristic(const Direction& d) {
  const double gamma = shape_gamma(d);
  const double zeta = shape_zeta(d);
  const double sigma = std::cbrt(gamma / (zeta * (1.0 - zeta)));
  return {gamma, zeta, sigma};
}

/// L^{w,z}(x, y) = x log(w/z) + y log((1-z)/(1-w)).
inline double lmgf_line_L(ParamPair p, const Direction& d) {
  detail::require_open_unit(p.w, "w");
  detail::require_open_unit(p.z, "z");
  return d.x() * std::log(p.w / p.z) + d.y() * std::log((1.0 - p.z) / (1.0 - p.w));
}

/// I^{w,z}_s(x, y) = (w - z) s - L^{w,z}(x, y).
inline double tilt_area_I(ParamPair p, double s, const Direction& d) {
  return (p.w - p.z) * s - lmgf_line_L(p, d);
}

/// (zeta_+^lambda, zeta_-^lambda): the pair at distance lambda with equal M-values.
inline std::pair<double, double> balanced_pair_zeta_pm(double lambda, const Direction& d) {
  if (!(lambda >= 0.0)) throw std::domain_error("lambda must be nonnegative");
  const double zeta = shape_zeta(d);
  if (lambda == 0.0) return {zeta, zeta};
  if (lambda >= 1.0) return {1.0, 0.0};
  const double x = d.x();
  const double y = d.y();
  const double l2 = lambda * lambda;
  const double shift =
      l2 * (y - x) / (4.0 * std::sqrt(x * y) + 2.0 * std::sqrt(l2 * (x - y) * (x - y) + 4.0 * x * y));
  return {zeta + lambda / 2.0 + shift, zeta - lambda / 2.0 + shift};
}

/// (xi_+^s, xi_-^s): the two solutions of M^t = s straddling zeta; (zeta, zeta)
/// when s <= gamma.
inline std::pair<double, double> level_pair_xi_pm(double s, const Direction& d) {
  const double gamma = shape_gamma(d);
  if (!(s > gamma)) {
    const double zeta = shape_zeta(d);
    return {zeta, zeta};
  }
  const double excess = s - gamma;
  const double root = std::sqrt(excess * excess + 4.0 * std::sqrt(d.x() * d.y()) * excess);
  return {0.5 + (d.x() - d.y() + root) / (2.0 * s), 0.5 + (d.x() - d.y() - root) / (2.0 * s)};
}

/// Envelope of the log-MGF line over pairs at distance lambda, restricted to
/// (0, w_cap) horizontally and (z_floor, 1) vertically.
inline ExtendedReal lmgf_envelope(const RateQuery& q, const Direction& d, Side side = Side::combined) {
  if (!(q.lambda >= 0.0)) throw std::domain_error("lambda must be nonnegative");
  detail::require_caps(q.w_cap, q.z_floor);
  if (side == Side::combined) {
    return max(lmgf_envelope(q, d, Side::horizontal), lmgf_envelope(q, d, Side::vertical));
  }
  if (q.lambda == 0.0) return ExtendedReal(0.0);
  const auto [zp, zm] = balanced_pair_zeta_pm(q.lambda, d);
  if (side == Side::horizontal) {
    if (q.lambda >= q.w_cap) return ExtendedReal::infinity();
    const double u = std::min(q.w_cap, zp);
    return ExtendedReal(lmgf_line_L({u, u - q.lambda}, d));
  }
  if (q.lambda >= 1.0 - q.z_floor) return ExtendedReal::infinity();
  const double v = std::max(q.z_floor, zm);
  return ExtendedReal(lmgf_line_L({v + q.lambda, v}, d));
}

/// Closed-form bulk right-tail rate; zero for s below the shape value.
/// Written in terms of d = sqrt(s) - sqrt(x) - sqrt(y) >= 0 so that every
/// term vanishes exactly at s = gamma instead of through cancellation.
inline double rate_bulk(double s, const Direction& d) {
  const double x = d.x();
  const double y = d.y();
  const double gamma = shape_gamma(d);
  if (!(s >= gamma)) return 0.0;
  const double rs = std::sqrt(s);
  const double rx = std::sqrt(x);
  const double ry = std::sqrt(y);
  const double delta = (s - gamma) / (rs + rx + ry);
  // (x + y - s)^2 - 4xy = (s - gamma)(s - (rx - ry)^2)
  const double radical = std::sqrt((s - gamma) * (s - (rx - ry) * (rx - ry)));
  // acosh arguments minus one: ((rs - rx)^2 - y) / (2 rs rx), likewise in y
  const double ux = delta * (rs - rx + ry) / (2.0 * rs * rx);
  const double uy = delta * (rs - ry + rx) / (2.0 * rs * ry);
  return radical - 2.0 * x * detail::acosh1p(ux) - 2.0 * y * detail::acosh1p(uy);
}

/// Shape function of the horizontally restricted boundary process.
inline double restricted_shape_hor(const Direction& d, double w_cap) {
  if (!(w_cap > 0.0 && w_cap <= 1.0)) throw std::domain_error("w_cap must lie in (0,1]");
  return w_cap >= shape_zeta(d) ? shape_gamma(d) : mean_M(w_cap, d);
}

/// Shape function of the vertically restricted boundary process.
inline double restricted_shape_ver(const Direction& d, double z_floor) {
  if (!(z_floor >= 0.0 && z_floor < 1.0)) throw std::domain_error("z_floor must lie in [0,1)");
  return z_floor <= shape_zeta(d) ? shape_gamma(d) : mean_M(z_floor, d);
}

/// Right-tail rate with the horizontal side capped at w_cap and the vertical
/// side floored at z_floor. `Side::combined` is the minimum of the two.
inline double rate_restricted(double s, const Direction& d, double w_cap, double z_floor,
                              Side side = Side::combined) {
  detail::require_caps(w_cap, z_floor);
  if (side == Side::combined) {
    return std::min(rate_restricted(s, d, w_cap, z_floor, Side::horizontal),
                    rate_restricted(s, d, w_cap, z_floor, Side::vertical));
  }
  const auto [xp, xm] = level_pair_xi_pm(s, d);
  if (side == Side::horizontal) {
    if (!(s > restricted_shape_hor(d, w_cap))) return 0.0;
    return tilt_area_I({std::min(w_cap, xp), xm}, s, d);
  }
  if (!(s > restricted_shape_ver(d, z_floor))) return 0.0;
  return tilt_area_I({xp, std::max(z_floor, xm)}, s, d);
}

enum class CdfVariant { plain, hor, ver };

/// Joint c.d.f. of the stationary boundary weights (and its hor/ver
/// modifications, which use survival factors on one axis).
inline double boundary_cdf(double z, std::span<const double> s, std::span<const double> t,
                           CdfVariant variant) {
  detail::require_open_unit(z, "z");
  double result = 1.0;
  for (double si : s) {
    const double tail = std::exp(-std::max(si, 0.0) * z);
    result *= (variant == CdfVariant::hor) ? tail : 1.0 - tail;
  }
  for (double tj : t) {
    const double tail = std::exp(-std::max(tj, 0.0) * (1.0 - z));
    result *= (variant == CdfVariant::ver) ? tail : 1.0 - tail;
  }
  return result;
}

/// Limit law of phi_n^hor / n.
inline double cif_limit_cdf(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("cif_limit_cdf: x must lie in [0,1]");
  const double a = std::sqrt(x);
  return a / (a + std::sqrt(1.0 - x));
}

/// Limit law of phi_n^ver / n.
inline double cif_limit_cdf_ver(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("cif_limit_cdf_ver: x must lie in [0,1]");
  const double b = std::sqrt(1.0 - x);
  return b / (std::sqrt(x) + b);
}

}  // namespace cgm
