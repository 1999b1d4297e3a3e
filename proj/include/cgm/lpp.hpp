#pragma once

// Last-passage dynamic programming on rectangles of Z^2: full-grid forward
// and reverse solves, rolling value-only solves, geodesic backtracking, exit
// points, Busemann increments, the competition interface, and the planar
// comparison checks.
//
// Coordinates: i is horizontal, j is vertical. Grids are stored row-major
// with one row per j. A weight source is anything callable as w(i, j).

#include <algorithm>
#include <cassert>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgm/lattice.hpp"

namespace cgm {

struct Vertex {
  Coord i = 0;
  Coord j = 0;

  friend constexpr bool operator==(const Vertex&, const Vertex&) = default;
};

template <class W>
concept WeightSource = requires(const W& w, Coord i, Coord j) {
  { w(i, j) } -> std::convertible_to<double>;
};

/// Dense rectangle of arbitrary real weights over [i0, i0+width) x [j0, j0+height).
class DenseWeights {
 public:
  DenseWeights(Vertex origin, Coord width, Coord height, double fill = 0.0)
      : origin_(origin), width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::domain_error("DenseWeights: empty rectangle");
    data_.assign(static_cast<std::size_t>(width * height), fill);
  }

  template <WeightSource W>
  static DenseWeights from(const W& w, Vertex lo, Vertex hi) {
    DenseWeights d(lo, hi.i - lo.i + 1, hi.j - lo.j + 1);
    for (Coord j = lo.j; j <= hi.j; ++j) {
      for (Coord i = lo.i; i <= hi.i; ++i) d.at(i, j) = w(i, j);
    }
    return d;
  }

  Vertex origin() const noexcept { return origin_; }
  Vertex last() const noexcept { return {origin_.i + width_ - 1, origin_.j + height_ - 1}; }
  Coord width() const noexcept { return width_; }
  Coord height() const noexcept { return height_; }

  bool contains(Coord i, Coord j) const noexcept {
    return i >= origin_.i && j >= origin_.j && i < origin_.i + width_ && j < origin_.j + height_;
  }

  double& at(Coord i, Coord j) { return data_[index(i, j)]; }
  double operator()(Coord i, Coord j) const noexcept { return data_[index(i, j)]; }

 private:
  std::size_t index(Coord i, Coord j) const noexcept {
    return static_cast<std::size_t>((j - origin_.j) * width_ + (i - origin_.i));
  }

  Vertex origin_;
  Coord width_;
  Coord height_;
  std::vector<double> data_;
};

enum class Orientation { forward, reverse };

/// Last-passage values over the rectangle [lo, hi]. Forward grids hold
/// G_{lo}(v) for every v; reverse grids hold G_{v}(hi).
class PassageGrid {
 public:
  PassageGrid(Vertex lo, Vertex hi, Orientation orientation, std::vector<double> values)
      : lo_(lo), hi_(hi), orientation_(orientation), values_(std::move(values)) {}

  Vertex lo() const noexcept { return lo_; }
  Vertex hi() const noexcept { return hi_; }
  Orientation orientation() const noexcept { return orientation_; }
  Coord width() const noexcept { return hi_.i - lo_.i + 1; }
  Coord height() const noexcept { return hi_.j - lo_.j + 1; }

  bool contains(Coord i, Coord j) const noexcept {
    return i >= lo_.i && i <= hi_.i && j >= lo_.j && j <= hi_.j;
  }

  double operator()(Coord i, Coord j) const noexcept {
    if (orientation_ == Orientation::forward) {
      return values_[static_cast<std::size_t>((j - lo_.j) * width() + (i - lo_.i))];
    }
    return values_[static_cast<std::size_t>((hi_.j - j) * width() + (hi_.i - i))];
  }

  double at(Coord i, Coord j) const {
    if (!contains(i, j)) throw std::out_of_range("PassageGrid: index outside rectangle");
    return (*this)(i, j);
  }

  /// G at the far corner: G_{lo}(hi) for either orientation.
  double corner_value() const noexcept {
    return orientation_ == Orientation::forward ? (*this)(hi_.i, hi_.j) : (*this)(lo_.i, lo_.j);
  }

 private:
  Vertex lo_;
  Vertex hi_;
  Orientation orientation_;
  std::vector<double> values_;  // kernel order: row-major from the anchor corner
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline void require_rectangle(Vertex lo, Vertex hi) {
  if (hi.i < lo.i || hi.j < lo.j) {
    throw std::domain_error("empty rectangle: (" + std::to_string(lo.i) + "," + std::to_string(lo.j) + ") to (" +
                            std::to_string(hi.i) + "," + std::to_string(hi.j) + ")");
  }
}

// The single DP kernel. Local coordinates a in [0, width), b in [0, height);
// `local(a, b)` yields the weight. Output is row-major in b.
template <class LocalW>
std::vector<double> forward_kernel(const LocalW& local, Coord width, Coord height) {
  std::vector<double> out(static_cast<std::size_t>(width * height));
  for (Coord b = 0; b < height; ++b) {
    double* row = out.data() + b * width;
    const double* below = b > 0 ? row - width : nullptr;
    for (Coord a = 0; a < width; ++a) {
      const double left = a > 0 ? row[a - 1] : kNegInf;
      const double down = below ? below[a] : kNegInf;
      const double best = (a == 0 && b == 0) ? 0.0 : std::max(left, down);
      row[a] = local(a, b) + best;
    }
  }
  return out;
}

}  // namespace detail

/// G_{start}(v) for all v in [start, end].
template <WeightSource W>
PassageGrid solve_forward(const W& w, Vertex start, Vertex end) {
  detail::require_rectangle(start, end);
  auto values = detail::forward_kernel([&](Coord a, Coord b) { return w(start.i + a, start.j + b); },
                                       end.i - start.i + 1, end.j - start.j + 1);
  return PassageGrid(start, end, Orientation::forward, std::move(values));
}

/// G_{v}(end) for all v in [start, end], via the forward kernel on the
/// reflected rectangle.
template <WeightSource W>
PassageGrid solve_reverse(const W& w, Vertex start, Vertex end) {
  detail::require_rectangle(start, end);
  auto values = detail::forward_kernel([&](Coord a, Coord b) { return w(end.i - a, end.j - b); },
                                       end.i - start.i + 1, end.j - start.j + 1);
  return PassageGrid(start, end, Orientation::reverse, std::move(values));
}

/// Bulk passage grid from `start` to `end` (both in Z_{>0}^2).
inline PassageGrid solve_bulk(const WeightField& field, Vertex start, Vertex end) {
  if (!field.is_bulk()) throw std::invalid_argument("solve_bulk: field must be bulk kind");
  if (start.i < 1 || start.j < 1) throw std::out_of_range("solve_bulk: start must be in Z_{>0}^2");
  return solve_forward(field, start, end);
}

/// Boundary-model passage grid from (0, 0) to `end`.
inline PassageGrid solve_boundary(const WeightField& field, Vertex end) {
  if (!field.is_boundary()) throw std::invalid_argument("solve_boundary: field must be boundary kind");
  if (end.i < 0 || end.j < 0) throw std::out_of_range("solve_boundary: end must be in Z_{>=0}^2");
  return solve_forward(field, {0, 0}, end);
}

/// Reverse bulk grid: G_{(i,j)}(m,n) for all 1 <= i <= m, 1 <= j <= n.
inline PassageGrid solve_reverse_bulk(const WeightField& field, Vertex end) {
  if (!field.is_bulk()) throw std::invalid_argument("solve_reverse_bulk: field must be bulk kind");
  if (end.i < 1 || end.j < 1) throw std::domain_error("solve_reverse_bulk: m, n must be >= 1");
  return solve_reverse(field, {1, 1}, end);
}

// ---------------------------------------------------------------------------
// Rolling value-only solves.

namespace detail {

template <class W>
void fill_row(const W& w, Coord j, Coord i0, Coord i1, double* out) {
  if constexpr (std::same_as<W, WeightField>) {
    w.fill_row(j, i0, i1, out);
  } else {
    for (Coord i = i0; i <= i1; ++i) out[i - i0] = w(i, j);
  }
}

}  // namespace detail

/// Scratch buffers for rolling solves; reuse across replicates.
struct RollingScratch {
  std::vector<double> weights;
  std::vector<double> values;
  std::vector<Coord> labels;
};

/// G_{start}(end) with O(width) memory. Same summation order as solve_forward.
template <WeightSource W>
double lpp_value(const W& w, Vertex start, Vertex end, RollingScratch& scratch) {
  detail::require_rectangle(start, end);
  const Coord width = end.i - start.i + 1;
  scratch.weights.resize(static_cast<std::size_t>(width));
  scratch.values.assign(static_cast<std::size_t>(width), detail::kNegInf);
  double* row = scratch.values.data();
  const double* wt = scratch.weights.data();
  for (Coord j = start.j; j <= end.j; ++j) {
    detail::fill_row(w, j, start.i, end.i, scratch.weights.data());
    double left = j == start.j ? 0.0 : detail::kNegInf;
    for (Coord a = 0; a < width; ++a) {
      const double best = (a == 0 && j == start.j) ? 0.0 : std::max(left, row[a]);
      row[a] = wt[a] + best;
      left = row[a];
    }
  }
  return row[width - 1];
}

template <WeightSource W>
double lpp_value(const W& w, Vertex start, Vertex end) {
  RollingScratch scratch;
  return lpp_value(w, start, end, scratch);
}

// ---------------------------------------------------------------------------
// Geodesics and exit points.

struct GeodesicPath {
  std::vector<Vertex> vertices;  // start first, end last
  std::size_t ties = 0;          // exact predecessor ties met while backtracking
};

/// Backtracks the maximizing path of a forward grid. On an exact tie the
/// vertical predecessor (the cell below) is taken.
inline GeodesicPath geodesic(const PassageGrid& grid) {
  if (grid.orientation() != Orientation::forward) {
    throw std::invalid_argument("geodesic: forward grid required");
  }
  GeodesicPath path;
  const Vertex lo = grid.lo();
  Vertex v = grid.hi();
  path.vertices.reserve(static_cast<std::size_t>(grid.width() + grid.height() - 1));
  path.vertices.push_back(v);
  while (!(v == lo)) {
    if (v.i == lo.i) {
      --v.j;
    } else if (v.j == lo.j) {
      --v.i;
    } else {
      const double left = grid(v.i - 1, v.j);
      const double down = grid(v.i, v.j - 1);
      if (left == down) ++path.ties;
      if (left > down) {
        --v.i;
      } else {
        --v.j;
      }
    }
    path.vertices.push_back(v);
  }
  std::reverse(path.vertices.begin(), path.vertices.end());
  return path;
}

struct ExitPair {
  Coord z_hor = 0;
  Coord z_ver = 0;

  friend constexpr bool operator==(const ExitPair&, const ExitPair&) = default;
};

/// Exit point of a geodesic from the origin: the last vertex on either axis.
inline ExitPair exit_points(const GeodesicPath& path) {
  ExitPair e;
  for (const Vertex& v : path.vertices) {
    if (v.j == 0 && v.i > 0) {
      e = {v.i, 0};
    } else if (v.i == 0 && v.j > 0) {
      e = {0, v.j};
    }
  }
  return e;
}

inline ExitPair exit_points(const PassageGrid& grid) {
  if (!(grid.lo() == Vertex{0, 0}) || grid.orientation() != Orientation::forward) {
    throw std::invalid_argument("exit_points: forward grid anchored at the origin required");
  }
  if (grid.hi().i < 1 || grid.hi().j < 1) throw std::domain_error("exit_points: endpoint needs m, n >= 1");
  return exit_points(geodesic(grid));
}

struct BoundarySolve {
  double value = 0.0;
  ExitPair exit;
  std::size_t ties = 0;
};

/// Value and exit point of the boundary model at (m, n) with O(m) memory.
/// Each cell inherits the exit label of the predecessor the backtrack would
/// choose, so this agrees with exit_points(solve_boundary(...)) exactly.
template <WeightSource W>
BoundarySolve boundary_value_exit(const W& w, Vertex end, RollingScratch& scratch) {
  if (end.i < 1 || end.j < 1) throw std::domain_error("boundary_value_exit: m, n must be >= 1");
  const Coord width = end.i + 1;
  scratch.weights.resize(static_cast<std::size_t>(width));
  scratch.values.resize(static_cast<std::size_t>(width));
  scratch.labels.resize(static_cast<std::size_t>(width));
  double* row = scratch.values.data();
  Coord* label = scratch.labels.data();
  const double* wt = scratch.weights.data();
  BoundarySolve out;

  // Labels: +k for horizontal exit k, -l for vertical exit l.
  detail::fill_row(w, 0, 0, end.i, scratch.weights.data());
  row[0] = wt[0] + 0.0;
  label[0] = 0;
  for (Coord a = 1; a < width; ++a) {
    row[a] = wt[a] + row[a - 1];
    label[a] = a;
  }
  for (Coord j = 1; j <= end.j; ++j) {
    detail::fill_row(w, j, 0, end.i, scratch.weights.data());
    row[0] = wt[0] + row[0];
    label[0] = -j;
    for (Coord a = 1; a < width; ++a) {
      const double left = row[a - 1];
      const double down = row[a];
      if (left == down) ++out.ties;
      if (left > down) {
        row[a] = wt[a] + left;
        label[a] = label[a - 1];
      } else {
        row[a] = wt[a] + down;
      }
    }
  }
  out.value = row[width - 1];
  const Coord lab = label[width - 1];
  out.exit = lab > 0 ? ExitPair{lab, 0} : ExitPair{0, -lab};
  return out;
}

// ---------------------------------------------------------------------------
// Busemann increments.

struct BusemannSample {
  std::vector<double> hor;  // hor[i-1] = G_{i,1}(m,n) - G_{i+1,1}(m,n), i in [k]
  std::vector<double> ver;  // ver[j-1] = G_{1,j}(m,n) - G_{1,j+1}(m,n), j in [l]
};

inline void require_busemann_range(Vertex end, Coord k, Coord l) {
  if (end.i < 1 || end.j < 1) throw std::domain_error("busemann: m, n must be >= 1");
  if (k < 0 || l < 0 || k > end.i - 1 || l > end.j - 1) {
    throw std::out_of_range("busemann: need 0 <= k <= m-1 and 0 <= l <= n-1");
  }
}

/// Increments from one full reverse grid.
inline BusemannSample busemann_increments(const WeightField& field, Vertex end, Coord k, Coord l) {
  require_busemann_range(end, k, l);
  const PassageGrid g = solve_reverse_bulk(field, end);
  BusemannSample b;
  for (Coord i = 1; i <= k; ++i) b.hor.push_back(g(i, 1) - g(i + 1, 1));
  for (Coord j = 1; j <= l; ++j) b.ver.push_back(g(1, j) - g(1, j + 1));
  return b;
}

/// Same increments with O(m) memory: a rolling reverse solve that keeps the
/// bottom row and the left column. Identical arithmetic to solve_reverse.
template <WeightSource W>
BusemannSample busemann_rolling(const W& w, Vertex end, Coord k, Coord l, RollingScratch& scratch) {
  require_busemann_range(end, k, l);
  const Coord m = end.i;
  const Coord width = m;
  scratch.weights.resize(static_cast<std::size_t>(width));
  scratch.values.assign(static_cast<std::size_t>(width), detail::kNegInf);
  // values[a] holds G_{(m - a, j)}(end) for the current row j.
  std::vector<double> left_col(static_cast<std::size_t>(l + 1));
  double* row = scratch.values.data();
  for (Coord j = end.j; j >= 1; --j) {
    detail::fill_row(w, j, 1, m, scratch.weights.data());
    const double* wt = scratch.weights.data();  // wt[i-1] = w(i, j)
    double left = j == end.j ? 0.0 : detail::kNegInf;
    for (Coord a = 0; a < width; ++a) {
      const double best = (a == 0 && j == end.j) ? 0.0 : std::max(left, row[a]);
      row[a] = wt[m - a - 1] + best;
      left = row[a];
    }
    if (j <= l + 1) left_col[static_cast<std::size_t>(j - 1)] = row[width - 1];
  }
  BusemannSample b;
  for (Coord i = 1; i <= k; ++i) b.hor.push_back(row[m - i] - row[m - i - 1]);
  for (Coord j = 1; j <= l; ++j) b.ver.push_back(left_col[static_cast<std::size_t>(j - 1)] - left_col[static_cast<std::size_t>(j)]);
  return b;
}

// ---------------------------------------------------------------------------
// Competition interface.

struct CifPath {
  std::vector<Vertex> phi;  // phi[n-1] = (phi_n^hor, phi_n^ver)
  std::size_t ties = 0;
};

/// Runs the interface recursion for N steps on the bulk field, computing G
/// lazily on the down-set of the path (a Young diagram stored by columns).
/// An exact tie (probability zero) is counted and resolved as a vertical step.
template <WeightSource W>
CifPath competition_interface(const W& w, Coord steps) {
  if (steps < 1) throw std::domain_error("competition_interface: N must be >= 1");
  // cols[c-1][r-1] = G(c, r); column heights are non-increasing in c.
  std::vector<std::vector<double>> cols;
  const auto ensure = [&](Coord i, Coord jmax) {
    while (static_cast<Coord>(cols.size()) < i) cols.emplace_back();
    Coord c0 = i;
    while (c0 > 1 && static_cast<Coord>(cols[static_cast<std::size_t>(c0 - 2)].size()) < jmax) --c0;
    for (Coord c = c0; c <= i; ++c) {
      auto& col = cols[static_cast<std::size_t>(c - 1)];
      const std::vector<double>* prev = c > 1 ? &cols[static_cast<std::size_t>(c - 2)] : nullptr;
      for (Coord r = static_cast<Coord>(col.size()) + 1; r <= jmax; ++r) {
        const double left = prev ? (*prev)[static_cast<std::size_t>(r - 1)] : detail::kNegInf;
        const double down = r > 1 ? col[static_cast<std::size_t>(r - 2)] : detail::kNegInf;
        const double best = (c == 1 && r == 1) ? 0.0 : std::max(left, down);
        col.push_back(w(c, r) + best);
      }
    }
  };
  const auto G = [&](Coord i, Coord j) { return cols[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; };

  CifPath path;
  path.phi.reserve(static_cast<std::size_t>(steps));
  Vertex v{1, 1};
  path.phi.push_back(v);
  for (Coord n = 2; n <= steps; ++n) {
    ensure(v.i + 1, v.j);
    ensure(v.i, v.j + 1);
    const double right = G(v.i + 1, v.j);
    const double up = G(v.i, v.j + 1);
    if (right == up) ++path.ties;
    if (right < up) {
      ++v.i;
    } else {
      ++v.j;
    }
    path.phi.push_back(v);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Down-right increments of a forward grid.

/// Increments along a down-right path, oriented positively: right steps give
/// G(next) - G(cur), down steps give G(cur) - G(next).
inline std::vector<double> down_right_increments(const PassageGrid& grid, std::span<const Vertex> path) {
  if (grid.orientation() != Orientation::forward) throw std::invalid_argument("down_right_increments: forward grid required");
  for (const Vertex& v : path) {
    if (!grid.contains(v.i, v.j)) throw std::out_of_range("down_right_increments: vertex outside grid");
  }
  std::vector<double> inc;
  inc.reserve(path.size() > 0 ? path.size() - 1 : 0);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const Vertex a = path[k];
    const Vertex b = path[k + 1];
    if (b.i == a.i + 1 && b.j == a.j) {
      inc.push_back(grid(b.i, b.j) - grid(a.i, a.j));
    } else if (b.i == a.i && b.j == a.j - 1) {
      inc.push_back(grid(a.i, a.j) - grid(b.i, b.j));
    } else {
      throw std::invalid_argument("down_right_increments: steps must be (1,0) or (0,-1)");
    }
  }
  return inc;
}

/// Staircase down-right path from (i0, j0): right, down, right, down, ...
/// with `steps` steps in total.
inline std::vector<Vertex> staircase_path(Vertex from, Coord steps) {
  std::vector<Vertex> p{from};
  for (Coord k = 0; k < steps; ++k) {
    Vertex v = p.back();
    if (k % 2 == 0) ++v.i; else --v.j;
    p.push_back(v);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Planar comparison (crossing) inequalities.

struct CrossingViolation {
  Coord i, j, m, n;
  int which;  // 1..4: left/right of the horizontal chain, then of the vertical chain
  double lhs;
  double rhs;
};

/// All start-to-end passage values on a dense grid: table(p, q)(v) = G_{p,q}(v).
class AllPairsPassage {
 public:
  explicit AllPairsPassage(const DenseWeights& w) : lo_(w.origin()), hi_(w.last()) {
    for (Coord q = lo_.j; q <= hi_.j; ++q) {
      for (Coord p = lo_.i; p <= hi_.i; ++p) grids_.push_back(solve_forward(w, {p, q}, hi_));
    }
  }

  /// G_{p,q}(m,n); -inf when (m,n) is not reachable from (p,q).
  double operator()(Coord p, Coord q, Coord m, Coord n) const {
    if (m < p || n < q) return detail::kNegInf;
    const auto idx = static_cast<std::size_t>((q - lo_.j) * (hi_.i - lo_.i + 1) + (p - lo_.i));
    return grids_[idx](m, n);
  }

  Vertex lo() const noexcept { return lo_; }
  Vertex hi() const noexcept { return hi_; }

 private:
  Vertex lo_;
  Vertex hi_;
  std::vector<PassageGrid> grids_;
};

/// Checks both comparison chains at one index tuple. The horizontal chain
/// needs i+1 <= m, the vertical chain j+1 <= n; both need m+1, n+1 in range.
inline void crossing_check_at(const AllPairsPassage& G, Coord i, Coord j, Coord m, Coord n,
                              std::vector<CrossingViolation>& out) {
  if (i + 1 <= m) {
    const double a = G(i, j, m + 1, n) - G(i + 1, j, m + 1, n);
    const double b = G(i, j, m, n) - G(i + 1, j, m, n);
    const double c = G(i, j, m, n + 1) - G(i + 1, j, m, n + 1);
    if (!(a <= b)) out.push_back({i, j, m, n, 1, a, b});
    if (!(b <= c)) out.push_back({i, j, m, n, 2, b, c});
  }
  if (j + 1 <= n) {
    const double a = G(i, j, m, n + 1) - G(i, j + 1, m, n + 1);
    const double b = G(i, j, m, n) - G(i, j + 1, m, n);
    const double c = G(i, j, m + 1, n) - G(i, j + 1, m + 1, n);
    if (!(a <= b)) out.push_back({i, j, m, n, 3, a, b});
    if (!(b <= c)) out.push_back({i, j, m, n, 4, b, c});
  }
}

/// Every admissible index tuple of the grid. Comparisons are exact.
inline std::vector<CrossingViolation> crossing_check(const DenseWeights& w) {
  const AllPairsPassage G(w);
  std::vector<CrossingViolation> out;
  const Vertex lo = G.lo();
  const Vertex hi = G.hi();
  for (Coord i = lo.i; i <= hi.i; ++i) {
    for (Coord j = lo.j; j <= hi.j; ++j) {
      for (Coord m = i; m + 1 <= hi.i; ++m) {
        for (Coord n = j; n + 1 <= hi.j; ++n) crossing_check_at(G, i, j, m, n, out);
      }
    }
  }
  return out;
}

/// Random weights on [1, size]^2, each a multiple of 2^-20 in [-1/2, 1/2).
/// Path sums of such values are exact in double precision, so the
/// comparison inequalities can be checked with zero tolerance.
inline DenseWeights dyadic_weights(EnvSeed seed, Coord size) {
  DenseWeights d({1, 1}, size, size);
  const std::uint64_t key = detail::stream_key(seed);
  for (Coord j = 1; j <= size; ++j) {
    for (Coord i = 1; i <= size; ++i) {
      const auto bits = static_cast<std::int64_t>(detail::cell_bits(key, i, j) >> 44);  // 20 bits
      d.at(i, j) = static_cast<double>(bits - (std::int64_t{1} << 19)) * 0x1.0p-20;
    }
  }
  return d;
}

struct CrossingFuzzResult {
  std::uint64_t grids = 0;
  std::vector<CrossingViolation> violations;
};

/// Crossing checks on `grids` dyadic grids, grid g drawn from EnvSeed{seed, g}.
inline CrossingFuzzResult crossing_fuzz(std::uint64_t seed, std::uint64_t grids, Coord size) {
  if (size < 2) throw std::domain_error("crossing_fuzz: size must be >= 2");
  CrossingFuzzResult res;
  for (std::uint64_t g = 0; g < grids; ++g) {
    auto v = crossing_check(dyadic_weights({seed, g}, size));
    res.violations.insert(res.violations.end(), v.begin(), v.end());
    ++res.grids;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Northeast/southwest reflection.

/// Compares the northeast process on [m+1] x [n+1] against the southwest
/// boundary process on the 180-degree rotated copy of the same eta array,
/// for every start/end pair. Each northeast column of values comes from a
/// reverse solve and each boundary one from a forward solve; both run the
/// same kernel over the same weights, so equality is exact.
struct ReflectionResult {
  std::size_t pairs_checked = 0;
  std::size_t mismatches = 0;

  bool ok() const noexcept { return mismatches == 0; }
};

inline ReflectionResult northeast_reflection_check(EnvSeed seed, double w, double z, Coord m, Coord n) {
  const WeightField ne = WeightField::northeast(seed, w, z, m, n);
  // Boundary field on [0,m] x [0,n] carrying eta rotated by 180 degrees.
  const double hor_scale = 1.0 / w;
  const double ver_scale = 1.0 / (1.0 - z);
  const auto rotated = [&](Coord i, Coord j) {
    const double e = ne.eta(m + 1 - i, n + 1 - j);
    if (i > 0 && j > 0) return 1.0 * e;
    if (i > 0) return hor_scale * e;
    if (j > 0) return ver_scale * e;
    return 0.0;
  };
  const DenseWeights rot = DenseWeights::from(rotated, {0, 0}, {m, n});
  const DenseWeights nw = DenseWeights::from(ne, {1, 1}, {m + 1, n + 1});

  ReflectionResult res;
  for (Coord p = 1; p <= m + 1; ++p) {
    for (Coord q = 1; q <= n + 1; ++q) {
      // Northeast: G_{p,q}(k,l) = passage from (k,l) up to (p,q).
      const PassageGrid ne_grid = solve_reverse(nw, {1, 1}, {p, q});
      const PassageGrid bd_grid = solve_forward(rot, {m + 1 - p, n + 1 - q}, {m, n});
      for (Coord k = 1; k <= p; ++k) {
        for (Coord l = 1; l <= q; ++l) {
          ++res.pairs_checked;
          if (ne_grid(k, l) != bd_grid(m + 1 - k, n + 1 - l)) ++res.mismatches;
        }
      }
    }
  }
  return res;
}

}  // namespace cgm
