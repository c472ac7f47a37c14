#pragma once

// Order- and direction-invariant features computed from spatial maps: the
// raw occupancy map (SP), histograms of gradient orientation over it (HOG),
// and histograms of points, stroke orientations, and turning angles over
// overlapping windows (HPOD).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hpod/error.hpp"
#include "hpod/feature_vector.hpp"
#include "hpod/ink.hpp"
#include "hpod/spatial_map.hpp"

namespace hpod {

/// Splits [0, 180] into `bins` equal intervals; the last one is closed at 180.
struct AngleQuantizer {
  double step = 20.0;
  int bins = 9;

  static AngleQuantizer with_step(double step) {
    if (!(step > 0.0)) throw DomainError("angle step must be positive");
    const double count = 180.0 / step;
    if (std::abs(count - std::round(count)) > 1e-9) {
      throw DomainError("angle step " + std::to_string(step) + " does not divide 180");
    }
    return {step, static_cast<int>(std::lround(count))};
  }

  /// 0-based bin of an angle in [0, 180].
  int bin(double deg) const {
    if (deg >= 180.0) return bins - 1;
    const int b = static_cast<int>(std::floor(deg / step));
    return std::clamp(b, 0, bins - 1);
  }
};

/// Partition of an n_i-cell axis into n_cells windows of cell_size cells,
/// interior windows widened by `overlap` cells on each side.
struct CellGrid {
  int n_cells = 6;
  int cell_size = 6;
  int overlap = 3;

  int extent() const { return n_cells * cell_size; }
};

/// Inclusive 1-based range of grid indices covered by window i (1-based).
/// Edge windows only widen towards the interior.
inline std::pair<int, int> cell_window(int i, const CellGrid& grid) {
  if (i < 1 || i > grid.n_cells) throw DomainError("cell index out of range");
  const int lo = (i - 1) * grid.cell_size - (i > 1 ? grid.overlap : 0) + 1;
  const int hi = i * grid.cell_size + (i < grid.n_cells ? grid.overlap : 0);
  return {lo, hi};
}

namespace detail {

inline void require_fit(const CellGrid& cells, int n) {
  if (cells.extent() != n) {
    throw DimensionError("cell grid covers " + std::to_string(cells.extent()) +
                         " cells but the map has " + std::to_string(n));
  }
}

// Visits every window in output order (x window index fastest), passing the
// 0-based inclusive bounds.
template <typename Fn>
void for_each_window(const CellGrid& cells, Fn fn) {
  for (int wy = 1; wy <= cells.n_cells; ++wy) {
    const auto [ylo, yhi] = cell_window(wy, cells);
    for (int wx = 1; wx <= cells.n_cells; ++wx) {
      const auto [xlo, xhi] = cell_window(wx, cells);
      fn(xlo - 1, xhi - 1, ylo - 1, yhi - 1);
    }
  }
}

inline void l2_normalize(std::vector<double>& v, std::size_t begin, std::size_t end,
                         double eps) {
  double sq = 0.0;
  for (std::size_t i = begin; i < end; ++i) sq += v[i] * v[i];
  const double scale = 1.0 / (std::sqrt(sq) + eps);
  for (std::size_t i = begin; i < end; ++i) v[i] *= scale;
}

}  // namespace detail

/// Unnormalized (occupied, empty) counts per window.
inline std::vector<double> point_histogram_counts(const BinaryGrid& occupancy,
                                                  const CellGrid& cells) {
  detail::require_fit(cells, occupancy.n);
  std::vector<double> out;
  out.reserve(2 * static_cast<std::size_t>(cells.n_cells * cells.n_cells));
  detail::for_each_window(cells, [&](int xlo, int xhi, int ylo, int yhi) {
    double filled = 0.0;
    double empty = 0.0;
    for (int iy = ylo; iy <= yhi; ++iy) {
      for (int ix = xlo; ix <= xhi; ++ix) (occupancy.at(ix, iy) ? filled : empty) += 1.0;
    }
    out.push_back(filled);
    out.push_back(empty);
  });
  return out;
}

/// Point histograms divided by cell_size^2. Overlapping windows hold more than
/// cell_size^2 cells, so bins can exceed 1.
inline std::vector<double> point_histograms(const SpatialMaps& maps, const CellGrid& cells) {
  auto h = point_histogram_counts(maps.occupancy, cells);
  const double area = static_cast<double>(cells.cell_size) * cells.cell_size;
  for (double& v : h) v /= area;
  return h;
}

/// Unnormalized per-window bin counts of the angle values whose mask is set.
inline std::vector<double> angle_histogram_counts(const Grid<double>& values,
                                                  const BinaryGrid& valid,
                                                  const CellGrid& cells,
                                                  const AngleQuantizer& quant) {
  detail::require_fit(cells, values.n);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(quant.bins * cells.n_cells * cells.n_cells));
  detail::for_each_window(cells, [&](int xlo, int xhi, int ylo, int yhi) {
    const std::size_t base = out.size();
    out.resize(base + static_cast<std::size_t>(quant.bins), 0.0);
    for (int iy = ylo; iy <= yhi; ++iy) {
      for (int ix = xlo; ix <= xhi; ++ix) {
        if (valid.at(ix, iy)) out[base + static_cast<std::size_t>(quant.bin(values.at(ix, iy)))] += 1.0;
      }
    }
  });
  return out;
}

inline std::vector<double> normalized_angle_histograms(const Grid<double>& values,
                                                       const BinaryGrid& valid,
                                                       const CellGrid& cells,
                                                       const AngleQuantizer& quant, double eps) {
  auto h = angle_histogram_counts(values, valid, cells, quant);
  const auto bins = static_cast<std::size_t>(quant.bins);
  for (std::size_t b = 0; b < h.size(); b += bins) detail::l2_normalize(h, b, b + bins, eps);
  return h;
}

inline std::vector<double> orientation_histograms(const SpatialMaps& maps, const CellGrid& cells,
                                                  const AngleQuantizer& quant, double eps = 1e-6) {
  return normalized_angle_histograms(maps.orientation, maps.orientation_valid, cells, quant, eps);
}

inline std::vector<double> dynamics_histograms(const SpatialMaps& maps, const CellGrid& cells,
                                               const AngleQuantizer& quant, double eps = 1e-6) {
  return normalized_angle_histograms(maps.dynamics, maps.dynamics_valid, cells, quant, eps);
}

// ---------------------------------------------------------------------------
// SP

inline FeatureVector sp_features(const CharacterMatrix& cm, const SpatialGridConfig& grid,
                                 Spans spans) {
  const auto expected = expected_dim(FeatureKind::SP) - 2;
  if (static_cast<std::size_t>(grid.n_i) * grid.n_i != expected) {
    throw DimensionError("SP features need a 28x28 grid, got " +
                         std::to_string(grid.n_i));
  }
  const BinaryGrid map = sp_map(cm, grid);
  FeatureVector f{FeatureKind::SP, std::vector<double>(map.data.begin(), map.data.end())};
  f.values.push_back(spans.first);
  f.values.push_back(spans.second);
  return f;
}

// ---------------------------------------------------------------------------
// HOG

struct HogConfig {
  SpatialGridConfig grid = SpatialGridConfig::from_step(0.0278);
  int n_cells = 6;
  double orientation_step = 20.0;
  int block_size = 1;     // cells per block side
  int block_overlap = 0;  // cells shared by adjacent blocks
  double eps = 1e-6;
};

enum class HogVote { Magnitude, Count };

/// Gradient of the occupancy map under centred (-1, 0, 1) kernels with zero
/// padding.
struct Gradient {
  Grid<double> magnitude;
  Grid<double> orientation;  // unsigned, [0, 180)
};

inline Gradient map_gradient(const BinaryGrid& map) {
  const int n = map.n;
  Gradient g{Grid<double>(n), Grid<double>(n)};
  auto value = [&](int ix, int iy) -> double { return map.contains(ix, iy) ? map.at(ix, iy) : 0.0; };
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double gx = value(ix + 1, iy) - value(ix - 1, iy);
      const double gy = value(ix, iy + 1) - value(ix, iy - 1);
      g.magnitude.at(ix, iy) = std::hypot(gx, gy);
      double deg = std::atan2(gy, gx) * detail::kRadToDeg;
      if (deg < 0.0) deg += 180.0;
      g.orientation.at(ix, iy) = detail::wrap_half_turn(deg);
    }
  }
  return g;
}

/// Per-cell orientation histograms before block normalization, cells listed
/// with the x cell index fastest.
inline std::vector<double> hog_cell_histograms(const BinaryGrid& map, int n_cells,
                                               const AngleQuantizer& quant,
                                               HogVote vote = HogVote::Magnitude) {
  if (n_cells < 1 || map.n % n_cells != 0) {
    throw DimensionError("HOG: " + std::to_string(n_cells) + " cells do not tile a " +
                         std::to_string(map.n) + "-cell map");
  }
  const int size = map.n / n_cells;
  const Gradient g = map_gradient(map);
  const auto bins = static_cast<std::size_t>(quant.bins);
  std::vector<double> out(bins * static_cast<std::size_t>(n_cells * n_cells), 0.0);
  for (int iy = 0; iy < map.n; ++iy) {
    for (int ix = 0; ix < map.n; ++ix) {
      const double m = g.magnitude.at(ix, iy);
      if (!(m > 0.0)) continue;
      const auto cell = static_cast<std::size_t>((iy / size) * n_cells + ix / size);
      out[cell * bins + static_cast<std::size_t>(quant.bin(g.orientation.at(ix, iy)))] +=
          vote == HogVote::Magnitude ? m : 1.0;
    }
  }
  return out;
}

inline FeatureVector hog_features(const CharacterMatrix& cm, const HogConfig& cfg, Spans spans) {
  const AngleQuantizer quant = AngleQuantizer::with_step(cfg.orientation_step);
  const int stride = cfg.block_size - cfg.block_overlap;
  if (cfg.block_size < 1 || stride < 1 || (cfg.n_cells - cfg.block_size) % stride != 0) {
    throw DimensionError("HOG: blocks do not tile the cell grid");
  }
  const int n_blocks = (cfg.n_cells - cfg.block_size) / stride + 1;
  const auto bins = static_cast<std::size_t>(quant.bins);
  const std::size_t block_len = bins * static_cast<std::size_t>(cfg.block_size * cfg.block_size);
  if (block_len * static_cast<std::size_t>(n_blocks * n_blocks) + 2 !=
      expected_dim(FeatureKind::HOG)) {
    throw DimensionError("HOG configuration does not produce a 326-dimensional feature");
  }

  const auto cells = hog_cell_histograms(sp_map(cm, cfg.grid), cfg.n_cells, quant);
  FeatureVector f{FeatureKind::HOG, {}};
  f.values.reserve(expected_dim(FeatureKind::HOG));
  // Blocks are listed with the y block index fastest.
  for (int bx = 0; bx < n_blocks; ++bx) {
    for (int by = 0; by < n_blocks; ++by) {
      const std::size_t begin = f.values.size();
      for (int cy = by * stride; cy < by * stride + cfg.block_size; ++cy) {
        for (int cx = bx * stride; cx < bx * stride + cfg.block_size; ++cx) {
          const auto off = static_cast<std::size_t>(cy * cfg.n_cells + cx) * bins;
          f.values.insert(f.values.end(), cells.begin() + static_cast<std::ptrdiff_t>(off),
                          cells.begin() + static_cast<std::ptrdiff_t>(off + bins));
        }
      }
      detail::l2_normalize(f.values, begin, f.values.size(), cfg.eps);
    }
  }
  f.values.push_back(spans.first);
  f.values.push_back(spans.second);
  return f;
}

// ---------------------------------------------------------------------------
// HPOD

struct HpodConfig {
  SpatialGridConfig grid = SpatialGridConfig::from_step(0.0278);
  int n_o = 1;
  int n_d = 3;
  double orientation_step = 20.0;
  double dynamics_step = 20.0;
  CellGrid point_cells{6, 6, 3};
  CellGrid orientation_cells{6, 6, 3};
  CellGrid dynamics_cells{6, 6, 3};
  double eps_o = 1e-6;
  double eps_d = 1e-6;
};

inline FeatureVector hpod_features(const InkCharacter& c, const HpodConfig& cfg, Spans spans) {
  const auto qo = AngleQuantizer::with_step(cfg.orientation_step);
  const auto qd = AngleQuantizer::with_step(cfg.dynamics_step);
  auto windows = [](const CellGrid& g) {
    return static_cast<std::size_t>(g.n_cells) * static_cast<std::size_t>(g.n_cells);
  };
  const std::size_t dim = 2 * windows(cfg.point_cells) +
                          static_cast<std::size_t>(qo.bins) * windows(cfg.orientation_cells) +
                          static_cast<std::size_t>(qd.bins) * windows(cfg.dynamics_cells) + 2;
  if (dim != expected_dim(FeatureKind::HPOD)) {
    throw DimensionError("HPOD configuration gives dimension " + std::to_string(dim) +
                         ", expected 722");
  }

  const SpatialMaps maps = build_spatial_maps(c, cfg.grid, cfg.n_o, cfg.n_d);
  FeatureVector f{FeatureKind::HPOD, point_histograms(maps, cfg.point_cells)};
  const auto ho = orientation_histograms(maps, cfg.orientation_cells, qo, cfg.eps_o);
  const auto hd = dynamics_histograms(maps, cfg.dynamics_cells, qd, cfg.eps_d);
  f.values.insert(f.values.end(), ho.begin(), ho.end());
  f.values.insert(f.values.end(), hd.begin(), hd.end());
  f.values.push_back(spans.first);
  f.values.push_back(spans.second);
  return f;
}

}  // namespace hpod
