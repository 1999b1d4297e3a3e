#pragma once

// Counter-based random environments. Every weight is a pure function of
// (master seed, replicate, i, j): no state, no streams, O(1) access to any
// lattice cell. The bulk, boundary and northeast fields built from the same
// seed share one underlying Exp(1) array eta(i, j).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include <boost/random/exponential_distribution.hpp>

namespace cgm {

using Coord = std::int64_t;

struct EnvSeed {
  std::uint64_t master = 0;
  std::uint64_t replicate = 0;

  friend constexpr bool operator==(const EnvSeed&, const EnvSeed&) = default;
};

namespace detail {

// Stafford's "Mix13" finalizer (the SplitMix64 output function).
constexpr std::uint64_t mix64(std::uint64_t v) noexcept {
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ULL;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebULL;
  v ^= v >> 31;
  return v;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t stream_key(const EnvSeed& seed) noexcept {
  return mix64(mix64(seed.master + kGolden) ^ (seed.replicate * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

constexpr std::uint64_t cell_bits(std::uint64_t key, Coord i, Coord j) noexcept {
  const std::uint64_t cell = (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(j));
  return mix64(key ^ mix64(cell * kGolden + 0x632be59bd9b4e019ULL));
}

constexpr double bits_to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Engine private to one cell: first output is the cell hash, later outputs
// (needed only by ziggurat rejections) continue the counter.
struct CellEngine {
  using result_type = std::uint64_t;
  std::uint64_t state;
  std::uint64_t calls = 0;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept { return calls++ == 0 ? state : mix64(state + calls * kGolden); }
};

// Exp(1) by ziggurat; one hash per cell on the fast path.
inline double bits_to_exp1(std::uint64_t bits) {
  CellEngine eng{bits};
  return boost::random::exponential_distribution<double>(1.0)(eng);
}

inline void check_coord(Coord i, Coord j) {
  constexpr Coord limit = Coord{1} << 31;
  if (i < 0 || j < 0 || i >= limit || j >= limit) {
    throw std::out_of_range("lattice coordinate out of range: (" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
}

}  // namespace detail

/// Uniform on [0, 1) with 53 random bits.
inline double uniform_at(const EnvSeed& seed, Coord i, Coord j) {
  detail::check_coord(i, j);
  return detail::bits_to_unit(detail::cell_bits(detail::stream_key(seed), i, j));
}

/// The Exp(1) variable eta(i, j).
inline double exp1_at(const EnvSeed& seed, Coord i, Coord j) {
  detail::check_coord(i, j);
  return detail::bits_to_exp1(detail::cell_bits(detail::stream_key(seed), i, j));
}

struct BulkKind {};

/// Southwest boundary: Exp(w) on the horizontal axis, Exp(1-z) on the vertical axis.
struct BoundaryKind {
  double w;
  double z;
};

/// Northeast boundary on [m+1] x [n+1]: Exp(w) on row n+1, Exp(1-z) on column m+1.
struct NortheastKind {
  double w;
  double z;
  Coord m;
  Coord n;
};

using FieldKind = std::variant<BulkKind, BoundaryKind, NortheastKind>;

/// A seeded weight field. Immutable and cheap to copy.
class WeightField {
 public:
  static WeightField bulk(EnvSeed seed) { return WeightField(seed, BulkKind{}); }

  static WeightField boundary(EnvSeed seed, double w, double z) {
    if (!(w > 0.0 && w <= 1.0) || !(z >= 0.0 && z < 1.0)) {
      throw std::domain_error("boundary field requires w in (0,1] and z in [0,1)");
    }
    return WeightField(seed, BoundaryKind{w, z});
  }

  static WeightField stationary(EnvSeed seed, double z) { return boundary(seed, z, z); }

  static WeightField northeast(EnvSeed seed, double w, double z, Coord m, Coord n) {
    if (!(w > 0.0 && w <= 1.0) || !(z >= 0.0 && z < 1.0)) {
      throw std::domain_error("northeast field requires w in (0,1] and z in [0,1)");
    }
    if (m < 1 || n < 1) throw std::domain_error("northeast field requires m, n >= 1");
    return WeightField(seed, NortheastKind{w, z, m, n});
  }

  const EnvSeed& seed() const noexcept { return seed_; }
  const FieldKind& kind() const noexcept { return kind_; }
  bool is_bulk() const noexcept { return std::holds_alternative<BulkKind>(kind_); }
  bool is_boundary() const noexcept { return std::holds_alternative<BoundaryKind>(kind_); }
  bool is_northeast() const noexcept { return std::holds_alternative<NortheastKind>(kind_); }

  bool contains(Coord i, Coord j) const noexcept {
    if (const auto* ne = std::get_if<NortheastKind>(&kind_)) {
      return i >= 1 && j >= 1 && i <= ne->m + 1 && j <= ne->n + 1;
    }
    if (is_bulk()) return i >= 1 && j >= 1;
    return i >= 0 && j >= 0;
  }

  /// Underlying Exp(1) value, shared by all kinds with this seed.
  double eta(Coord i, Coord j) const noexcept { return detail::bits_to_exp1(detail::cell_bits(key_, i, j)); }

  double scale(Coord i, Coord j) const noexcept {
    if (const auto* b = std::get_if<BoundaryKind>(&kind_)) {
      if (i > 0 && j > 0) return 1.0;
      if (i > 0) return 1.0 / b->w;
      if (j > 0) return 1.0 / (1.0 - b->z);
      return 0.0;
    }
    if (const auto* ne = std::get_if<NortheastKind>(&kind_)) {
      const bool in_i = i <= ne->m;
      const bool in_j = j <= ne->n;
      if (in_i && in_j) return 1.0;
      if (in_i) return 1.0 / ne->w;
      if (in_j) return 1.0 / (1.0 - ne->z);
      return 0.0;
    }
    return 1.0;
  }

  /// Range-checked weight.
  double weight_at(Coord i, Coord j) const {
    if (!contains(i, j)) {
      throw std::out_of_range("weight_at: (" + std::to_string(i) + "," + std::to_string(j) + ") outside field");
    }
    return (*this)(i, j);
  }

  /// Unchecked weight; callers guarantee (i, j) is in range.
  double operator()(Coord i, Coord j) const noexcept {
    const double s = scale(i, j);
    return s == 0.0 ? 0.0 : (s == 1.0 ? eta(i, j) : s * eta(i, j));
  }

  /// out[i - i0] = (*this)(i, j) for i in [i0, i1]. Same values as
  /// operator(), with the scale lookups hoisted out of the interior.
  void fill_row(Coord j, Coord i0, Coord i1, double* out) const noexcept {
    for (Coord i = i0; i <= i1; ++i) out[i - i0] = eta(i, j);
    if (is_bulk()) return;
    const auto fix = [&](Coord i) {
      const double s = scale(i, j);
      double& v = out[i - i0];
      v = s == 0.0 ? 0.0 : (s == 1.0 ? v : s * v);
    };
    if (const auto* ne = std::get_if<NortheastKind>(&kind_); ne && j <= ne->n) {
      if (i1 == ne->m + 1) fix(i1);
      return;
    }
    if (is_boundary() && j > 0) {
      if (i0 == 0) fix(0);
      return;
    }
    for (Coord i = i0; i <= i1; ++i) fix(i);
  }

 private:
  WeightField(EnvSeed seed, FieldKind kind)
      : seed_(seed), kind_(kind), key_(detail::stream_key(seed)) {}

  EnvSeed seed_;
  FieldKind kind_;
  std::uint64_t key_;
};

}  // namespace cgm
