#pragma once

// Spatial quantization of ink onto an N x N grid, and the per-point stroke
// angles that HPOD maps onto it.
//
// Index conventions: grid cells are addressed (ix, iy) with ix along x and iy
// along y. spatial_index() and cell_window() use 1-based indices; Grid
// accessors are 0-based.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpod/error.hpp"
#include "hpod/ink.hpp"

namespace hpod {

struct SpatialGridConfig {
  double delta_sp = 0.0278;
  int n_i = 36;

  static SpatialGridConfig from_step(double delta_sp) {
    if (!(delta_sp > 0.0) || delta_sp > 0.5) {
      throw DomainError("grid step must lie in (0, 0.5]");
    }
    return {delta_sp, static_cast<int>(std::lround(1.0 / delta_sp))};
  }
};

/// n x n values stored with x varying fastest, so the storage order equals
/// concatenating the grid's columns (fixed y).
template <typename T>
struct Grid {
  int n = 0;
  std::vector<T> data;

  Grid() = default;
  explicit Grid(int size, T fill = T{})
      : n(size), data(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), fill) {}

  T& at(int ix, int iy) { return data[static_cast<std::size_t>(iy) * n + ix]; }
  const T& at(int ix, int iy) const { return data[static_cast<std::size_t>(iy) * n + ix]; }
  bool contains(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < n && iy < n; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

using BinaryGrid = Grid<std::uint8_t>;

/// 1-based cell index i with (i-1)*delta <= coord < i*delta. Coordinates at or
/// beyond the last cell's lower edge land in cell n_i, which is closed above.
inline int spatial_index(double coord, const SpatialGridConfig& cfg) {
  // Tolerates round-off from interpolation just outside the unit interval.
  constexpr double kSlack = 1e-9;
  if (!(coord >= -kSlack && coord <= 1.0 + kSlack)) {
    throw DomainError("coordinate " + std::to_string(coord) + " outside [0, 1]");
  }
  if (coord <= 0.0) return 1;
  const auto i = static_cast<long>(std::floor(coord / cfg.delta_sp)) + 1;
  return static_cast<int>(std::min<long>(i, cfg.n_i));
}

/// Occupancy map: a cell is 1 iff at least one point falls in it.
inline BinaryGrid sp_map(const CharacterMatrix& cm, const SpatialGridConfig& cfg) {
  BinaryGrid g(cfg.n_i);
  for (const auto& p : cm.rows) {
    g.at(spatial_index(p.x, cfg) - 1, spatial_index(p.y, cfg) - 1) = 1;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Stroke angles, all in degrees.

namespace detail {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

inline double wrap_half_turn(double deg) { return deg >= 180.0 ? 0.0 : deg + 0.0; }

}  // namespace detail

/// Unsigned orientation in [0, 180) of the chord (dx, dy), resolved through
/// the four sign cases of the arctangent. A coincident chord has
/// orientation 0; exact 180 is wrapped to 0 so a reversed axis-aligned
/// stroke gets the same angle as the forward one.
inline double chord_orientation(double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return 0.0;
  const double base = std::atan(dy / dx) * detail::kRadToDeg;  // [-90, 90]
  double deg;
  if (dx >= 0.0 && dy >= 0.0) {
    deg = base;
  } else if (dx < 0.0 && dy < 0.0) {
    deg = base;
  } else {
    deg = base + 180.0;
  }
  return detail::wrap_half_turn(deg);
}

/// Orientation in [0, 180) of the normal to the chord (dx, dy), from
/// -atan(dx/dy) shifted into the upper half-turn.
inline double chord_normal_orientation(double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return 0.0;
  const double base = -std::atan(dx / dy) * detail::kRadToDeg;  // [-90, 90]
  return detail::wrap_half_turn(base < 0.0 ? base + 180.0 : base);
}

namespace detail {

template <typename ChordAngle>
std::vector<double> chord_angles(const Stroke& s, int half_window, ChordAngle angle) {
  if (half_window < 1) throw DomainError("chord half-window must be >= 1");
  const std::size_t n = s.size();
  const auto h = static_cast<std::size_t>(half_window);
  if (n < 2) return std::vector<double>(n, 0.0);
  if (n < 2 * h + 1) {
    // Too short for a centred chord: the whole stroke shares its end-to-end chord.
    return std::vector<double>(n, angle(s.back().x - s.front().x, s.back().y - s.front().y));
  }
  std::vector<double> out(n);
  for (std::size_t i = h; i + h < n; ++i) {
    out[i] = angle(s[i + h].x - s[i - h].x, s[i + h].y - s[i - h].y);
  }
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(h), out[h]);
  std::fill(out.end() - static_cast<std::ptrdiff_t>(h), out.end(), out[n - 1 - h]);
  return out;
}

inline double turning_angle(const InkPoint& prev, const InkPoint& at, const InkPoint& next) {
  const double ix = at.x - prev.x;
  const double iy = at.y - prev.y;
  const double ox = next.x - at.x;
  const double oy = next.y - at.y;
  const double in_len = std::hypot(ix, iy);
  const double out_len = std::hypot(ox, oy);
  if (!(in_len > 0.0) || !(out_len > 0.0)) return 0.0;
  const double dot = (ix / in_len) * (ox / out_len) + (iy / in_len) * (oy / out_len);
  return std::acos(std::clamp(dot, -1.0, 1.0)) * kRadToDeg;
}

}  // namespace detail

/// Per-point stroke orientation from the chord p[n-n_o] -> p[n+n_o]; the
/// first and last n_o points copy the nearest computed value.
inline std::vector<double> stroke_orientations(const Stroke& s, int n_o) {
  return detail::chord_angles(s, n_o, chord_orientation);
}

inline std::vector<double> stroke_normal_orientations(const Stroke& s, int n_o) {
  return detail::chord_angles(s, n_o, chord_normal_orientation);
}

/// Per-point turning angle in [0, 180] between the incoming direction
/// p[n-n_d] -> p[n] and the outgoing direction p[n] -> p[n+n_d]. Strokes too
/// short for n_d use the largest window that fits; strokes under three points
/// have zero turning.
inline std::vector<double> stroke_dynamics(const Stroke& s, int n_d) {
  if (n_d < 1) throw DomainError("dynamics half-window must be >= 1");
  const std::size_t n = s.size();
  const std::size_t h = std::min<std::size_t>(static_cast<std::size_t>(n_d), n == 0 ? 0 : (n - 1) / 2);
  if (h == 0) return std::vector<double>(n, 0.0);
  std::vector<double> out(n);
  for (std::size_t i = h; i + h < n; ++i) {
    out[i] = detail::turning_angle(s[i - h], s[i], s[i + h]);
  }
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(h), out[h]);
  std::fill(out.end() - static_cast<std::ptrdiff_t>(h), out.end(), out[n - 1 - h]);
  return out;
}

using StrokeAngles = std::vector<std::vector<double>>;

inline StrokeAngles orientation_at_points(const InkCharacter& c, int n_o) {
  StrokeAngles out;
  for (const auto& s : c.strokes) out.push_back(stroke_orientations(s, n_o));
  return out;
}

inline StrokeAngles orthogonal_orientation_at_points(const InkCharacter& c, int n_o) {
  StrokeAngles out;
  for (const auto& s : c.strokes) out.push_back(stroke_normal_orientations(s, n_o));
  return out;
}

inline StrokeAngles dynamics_at_points(const InkCharacter& c, int n_d) {
  StrokeAngles out;
  for (const auto& s : c.strokes) out.push_back(stroke_dynamics(s, n_d));
  return out;
}

// ---------------------------------------------------------------------------
// HPOD spatial maps.

struct SpatialMaps {
  BinaryGrid occupancy;
  Grid<double> orientation;
  Grid<double> dynamics;
  BinaryGrid orientation_valid;
  BinaryGrid dynamics_valid;
  // Cells written by an ink point itself rather than by thickening.
  BinaryGrid original;

  explicit SpatialMaps(int n = 0)
      : occupancy(n), orientation(n), dynamics(n), orientation_valid(n),
        dynamics_valid(n), original(n) {}

  int size() const { return occupancy.n; }

  friend bool operator==(const SpatialMaps&, const SpatialMaps&) = default;
};

/// One ink point after quantization: its 0-based cell and its angles.
struct MappedPoint {
  int ix = 0;
  int iy = 0;
  double orientation = 0.0;
  double dynamics = 0.0;
  double normal = 0.0;
};

/// The two neighbour offsets across the stroke for a normal orientation:
/// sector 1 horizontal, 2 diagonal, 3 vertical, 4 anti-diagonal.
struct ThickeningOffsets {
  int dx1, dy1, dx2, dy2;
};

inline ThickeningOffsets thickening_offsets(double normal_deg) {
  if (normal_deg < 22.5 || normal_deg >= 157.5) return {-1, 0, 1, 0};
  if (normal_deg < 67.5) return {-1, -1, 1, 1};
  if (normal_deg < 112.5) return {0, -1, 0, 1};
  return {-1, 1, 1, -1};
}

namespace detail {

// Cells hit by several points keep the largest angle, which makes the result
// independent of the order in which points are visited.
inline void merge_angle(Grid<double>& values, BinaryGrid& valid, int ix, int iy, double v) {
  if (!valid.at(ix, iy) || v > values.at(ix, iy)) values.at(ix, iy) = v;
  valid.at(ix, iy) = 1;
}

}  // namespace detail

/// Writes each point's values into its two neighbours across the stroke.
/// Neighbours outside the grid are skipped and cells holding original point
/// data are never overwritten.
inline SpatialMaps thicken(SpatialMaps maps, std::span<const MappedPoint> points) {
  for (const auto& p : points) {
    const auto off = thickening_offsets(p.normal);
    for (const auto& [dx, dy] : {std::pair{off.dx1, off.dy1}, std::pair{off.dx2, off.dy2}}) {
      const int ix = p.ix + dx;
      const int iy = p.iy + dy;
      if (!maps.occupancy.contains(ix, iy) || maps.original.at(ix, iy)) continue;
      maps.occupancy.at(ix, iy) = 1;
      detail::merge_angle(maps.orientation, maps.orientation_valid, ix, iy, p.orientation);
      detail::merge_angle(maps.dynamics, maps.dynamics_valid, ix, iy, p.dynamics);
    }
  }
  return maps;
}

inline std::vector<MappedPoint> map_points(const InkCharacter& c, const SpatialGridConfig& cfg,
                                           int n_o, int n_d) {
  validate(c);
  std::vector<MappedPoint> out;
  out.reserve(c.point_count());
  for (const auto& s : c.strokes) {
    const auto orient = stroke_orientations(s, n_o);
    const auto normal = stroke_normal_orientations(s, n_o);
    const auto dyn = stroke_dynamics(s, n_d);
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.push_back({spatial_index(s[i].x, cfg) - 1, spatial_index(s[i].y, cfg) - 1,
                     orient[i], dyn[i], normal[i]});
    }
  }
  return out;
}

inline SpatialMaps build_spatial_maps(const InkCharacter& c, const SpatialGridConfig& cfg,
                                      int n_o, int n_d) {
  const auto points = map_points(c, cfg, n_o, n_d);
  SpatialMaps maps(cfg.n_i);
  for (const auto& p : points) {
    maps.occupancy.at(p.ix, p.iy) = 1;
    maps.original.at(p.ix, p.iy) = 1;
    detail::merge_angle(maps.orientation, maps.orientation_valid, p.ix, p.iy, p.orientation);
    detail::merge_angle(maps.dynamics, maps.dynamics_valid, p.ix, p.iy, p.dynamics);
  }
  return thicken(std::move(maps), points);
}

}  // namespace hpod
