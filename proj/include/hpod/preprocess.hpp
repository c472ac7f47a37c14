#pragma once

// Removal of writer-dependent "external" variation from raw ink: repeated
// points, location and size, writing speed, and trace roughness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <variant>
#include <vector>

#include "hpod/error.hpp"
#include "hpod/ink.hpp"

namespace hpod {

/// Resample to a fixed number of points distributed over all strokes in
/// proportion to their lengths.
struct TotalPoints {
  std::size_t count = 128;
};

/// Resample every stroke so consecutive points are `delta` apart.
struct Spacing {
  double delta = 0.0278;
};

using ResampleSpec = std::variant<TotalPoints, Spacing>;

struct PreprocessConfig {
  ResampleSpec resample = TotalPoints{128};
  int smoothing_passes = 1;
};

inline InkCharacter remove_repeated_points(const InkCharacter& c) {
  validate(c);
  InkCharacter out = c;
  for (auto& s : out.strokes) {
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return out;
}

/// Min-max scales each axis independently onto [0, 1]. An axis with zero
/// extent is mapped to 0.5. The pre-normalization extents are captured on the
/// first call only, so normalizing twice is a no-op.
inline InkCharacter normalize_coordinates(const InkCharacter& c) {
  validate(c);
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const auto& s : c.strokes) {
    for (const auto& p : s) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
  }
  const double w = max_x - min_x;
  const double h = max_y - min_y;

  InkCharacter out = c;
  for (auto& s : out.strokes) {
    for (auto& p : s) {
      p.x = w > 0.0 ? (p.x - min_x) / w : 0.5;
      p.y = h > 0.0 ? (p.y - min_y) / h : 0.5;
    }
  }
  if (!out.raw_width) out.raw_width = w;
  if (!out.raw_height) out.raw_height = h;
  return out;
}

namespace detail {

inline double distance(const InkPoint& a, const InkPoint& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

inline double polyline_length(const Stroke& s) {
  double len = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) len += distance(s[i - 1], s[i]);
  return len;
}

inline InkPoint lerp(const InkPoint& a, const InkPoint& b, double t) {
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

// `count` >= 2 samples at equal arc-length steps; endpoints are copied exactly.
inline Stroke resample_uniform_count(const Stroke& s, std::size_t count) {
  const double total = polyline_length(s);
  if (s.size() < 2 || !(total > 0.0)) return Stroke{s.front()};

  Stroke out;
  out.reserve(count);
  out.push_back(s.front());
  std::size_t seg = 1;
  double walked = 0.0;  // arc length at s[seg - 1]
  double seg_len = distance(s[0], s[1]);
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(count - 1);
    while (seg + 1 < s.size() && walked + seg_len < target) {
      walked += seg_len;
      ++seg;
      seg_len = distance(s[seg - 1], s[seg]);
    }
    const double t = seg_len > 0.0 ? std::clamp((target - walked) / seg_len, 0.0, 1.0) : 0.0;
    out.push_back(lerp(s[seg - 1], s[seg], t));
  }
  out.push_back(s.back());
  return out;
}

// Walks the polyline emitting the first point at Euclidean distance `delta`
// from the previous sample, so every emitted gap is exactly `delta` even
// across corners. The final gap may be shorter (see resample()).
inline Stroke resample_spacing(const Stroke& s, double delta) {
  if (s.size() < 2) return s;
  Stroke out{s.front()};
  InkPoint cur = s.front();
  std::size_t seg = 1;
  double seg_t = 0.0;  // position of `cur` on segment [seg-1, seg]
  const double r2 = delta * delta;
  while (seg < s.size()) {
    bool found = false;
    for (std::size_t j = seg; j < s.size(); ++j) {
      const InkPoint& a = s[j - 1];
      const InkPoint& b = s[j];
      const double dx = b.x - a.x;
      const double dy = b.y - a.y;
      const double ax = a.x - cur.x;
      const double ay = a.y - cur.y;
      const double qa = dx * dx + dy * dy;
      if (!(qa > 0.0)) continue;
      const double qb = 2.0 * (ax * dx + ay * dy);
      const double qc = ax * ax + ay * ay - r2;
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) continue;
      // Segment start lies inside the circle, so the larger root is the exit.
      double t = (-qb + std::sqrt(disc)) / (2.0 * qa);
      const double lo = j == seg ? seg_t : 0.0;
      constexpr double kSlack = 1e-12;  // exits landing exactly on a vertex
      if (t >= lo - kSlack && t <= 1.0 + kSlack) {
        t = std::clamp(t, lo, 1.0);
        cur = lerp(a, b, t);
        out.push_back(cur);
        seg = j;
        seg_t = t;
        found = true;
        break;
      }
    }
    if (!found) break;
  }
  if (distance(out.back(), s.back()) > delta / 2.0) out.push_back(s.back());
  return out;
}

// Largest-remainder split of `budget` samples over strokes proportionally to
// their lengths, at least two per stroke.
inline std::vector<std::size_t> allocate_points(const std::vector<double>& lengths,
                                                std::size_t budget) {
  const std::size_t m = lengths.size();
  std::vector<std::size_t> counts(m, 2);
  if (m == 0) return counts;
  if (budget < 2 * m) {
    throw DomainError("resample: " + std::to_string(budget) +
                      " points cannot cover " + std::to_string(m) +
                      " strokes with at least 2 points each");
  }
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  std::vector<double> remainder(m, 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double quota = static_cast<double>(budget) * lengths[i] / total;
    const double fl = std::floor(quota);
    counts[i] = std::max<std::size_t>(2, static_cast<std::size_t>(fl));
    remainder[i] = quota - fl;
    assigned += counts[i];
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < budget; k = (k + 1) % m) {
    ++counts[order[k]];
    ++assigned;
  }
  // The two-point floor can overshoot; take back from the smallest remainders.
  for (std::size_t k = m; assigned > budget;) {
    k = k == 0 ? m - 1 : k - 1;
    if (counts[order[k]] > 2) {
      --counts[order[k]];
      --assigned;
    }
  }
  return counts;
}

}  // namespace detail

/// Re-traces every stroke at uniform spacing.
///
/// Spacing mode walks each stroke emitting points exactly `delta` apart and
/// appends the original last point unless it lies within delta/2 of the last
/// sample. TotalPoints mode gives each stroke a share of the budget
/// proportional to its length (two minimum) and spaces the share uniformly
/// in arc length. Single-point strokes pass through and count as one point;
/// a character made only of single points repeats them to fill the budget.
inline InkCharacter resample(const InkCharacter& c, const ResampleSpec& spec) {
  validate(c);
  InkCharacter out = c;
  if (const auto* sp = std::get_if<Spacing>(&spec)) {
    if (!(sp->delta > 0.0)) throw DomainError("resample: spacing must be positive");
    for (auto& s : out.strokes) s = detail::resample_spacing(s, sp->delta);
    return out;
  }

  const std::size_t n = std::get<TotalPoints>(spec).count;
  std::vector<std::size_t> multi;
  std::vector<double> lengths;
  std::size_t singles = 0;
  for (std::size_t i = 0; i < c.strokes.size(); ++i) {
    const double len = detail::polyline_length(c.strokes[i]);
    if (c.strokes[i].size() >= 2 && len > 0.0) {
      multi.push_back(i);
      lengths.push_back(len);
    } else {
      ++singles;
    }
  }
  if (n < singles) throw DomainError("resample: point budget smaller than stroke count");
  if (multi.empty()) {
    // Only single points: repeat them to fill the budget, earlier strokes
    // taking the remainder.
    const std::size_t m = c.strokes.size();
    for (std::size_t i = 0; i < m; ++i) {
      out.strokes[i] = Stroke(n / m + (i < n % m ? 1 : 0), c.strokes[i].front());
    }
    return out;
  }
  const auto counts = detail::allocate_points(lengths, n - singles);
  for (std::size_t i = 0; i < c.strokes.size(); ++i) {
    if (std::find(multi.begin(), multi.end(), i) == multi.end()) {
      out.strokes[i] = Stroke{c.strokes[i].front()};
    }
  }
  for (std::size_t k = 0; k < multi.size(); ++k) {
    out.strokes[multi[k]] = detail::resample_uniform_count(c.strokes[multi[k]], counts[k]);
  }
  return out;
}

/// Repeated passes of the (1/4, 1/2, 1/4) low-pass filter over each stroke's
/// coordinate sequences. Stroke endpoints stay fixed.
inline InkCharacter smooth(const InkCharacter& c, int passes) {
  if (passes < 0) throw DomainError("smooth: negative pass count");
  InkCharacter out = c;
  for (auto& s : out.strokes) {
    if (s.size() < 3) continue;
    Stroke tmp(s.size());
    for (int p = 0; p < passes; ++p) {
      tmp.front() = s.front();
      tmp.back() = s.back();
      for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        tmp[i].x = 0.25 * s[i - 1].x + 0.5 * s[i].x + 0.25 * s[i + 1].x;
        tmp[i].y = 0.25 * s[i - 1].y + 0.5 * s[i].y + 0.25 * s[i + 1].y;
      }
      s.swap(tmp);
    }
  }
  return out;
}

inline InkCharacter preprocess(const InkCharacter& c, const PreprocessConfig& cfg) {
  return smooth(resample(normalize_coordinates(remove_repeated_points(c)), cfg.resample),
                cfg.smoothing_passes);
}

}  // namespace hpod
