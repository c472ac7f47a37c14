#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hpod/error.hpp"

namespace hpod {

struct InkPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const InkPoint&, const InkPoint&) = default;
};

/// Points of one pen-down..pen-up trace, in writing order.
using Stroke = std::vector<InkPoint>;

struct InkCharacter {
  std::vector<Stroke> strokes;
  std::optional<std::string> label;
  // Bounding-box extents before normalization; unset until the character has
  // been normalized.
  std::optional<double> raw_width;
  std::optional<double> raw_height;

  std::size_t point_count() const {
    std::size_t n = 0;
    for (const auto& s : strokes) n += s.size();
    return n;
  }

  friend bool operator==(const InkCharacter&, const InkCharacter&) = default;
};

/// Throws StructuralError unless the character has at least one stroke and
/// every stroke has at least one point.
inline void validate(const InkCharacter& c) {
  if (c.strokes.empty()) throw StructuralError("character has no strokes");
  for (std::size_t i = 0; i < c.strokes.size(); ++i) {
    if (c.strokes[i].empty()) {
      throw StructuralError("stroke " + std::to_string(i) + " has no points");
    }
  }
}

/// All points of a character stacked row-wise in writing order: stroke order
/// first, then point order within each stroke.
struct CharacterMatrix {
  std::vector<InkPoint> rows;
  // Row index at which each stroke begins.
  std::vector<std::size_t> stroke_boundaries;

  std::size_t size() const { return rows.size(); }

  std::vector<double> column_x() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& p : rows) out.push_back(p.x);
    return out;
  }

  std::vector<double> column_y() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& p : rows) out.push_back(p.y);
    return out;
  }

  friend bool operator==(const CharacterMatrix&, const CharacterMatrix&) = default;
};

inline CharacterMatrix character_matrix(const InkCharacter& c) {
  validate(c);
  CharacterMatrix m;
  m.rows.reserve(c.point_count());
  m.stroke_boundaries.reserve(c.strokes.size());
  for (const auto& s : c.strokes) {
    m.stroke_boundaries.push_back(m.rows.size());
    m.rows.insert(m.rows.end(), s.begin(), s.end());
  }
  return m;
}

/// Aspect descriptor of the pre-normalization bounding box: both extents
/// divided by the larger one, or (0, 0) for a degenerate point character.
inline std::pair<double, double> span_features(const InkCharacter& c) {
  const double w = c.raw_width.value_or(0.0);
  const double h = c.raw_height.value_or(0.0);
  const double m = std::max(w, h);
  if (!(m > 0.0)) return {0.0, 0.0};
  return {w / m, h / m};
}

}  // namespace hpod
