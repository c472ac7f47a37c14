#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hpod/error.hpp"

namespace hpod {

enum class FeatureKind { ST, DFT, DCT, DWT, SP, HOG, HPOD };

inline constexpr std::array<FeatureKind, 7> kAllFeatureKinds = {
    FeatureKind::ST, FeatureKind::DFT, FeatureKind::DCT, FeatureKind::DWT,
    FeatureKind::SP, FeatureKind::HOG, FeatureKind::HPOD};

/// Feature dimension including the two span features.
constexpr std::size_t expected_dim(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::ST:
    case FeatureKind::DFT:
    case FeatureKind::DCT:
    case FeatureKind::DWT:
      return 258;
    case FeatureKind::SP:
      return 786;
    case FeatureKind::HOG:
      return 326;
    case FeatureKind::HPOD:
      return 722;
  }
  return 0;
}

/// True for the kinds built from a spatial map, which ignore stroke order and
/// direction.
constexpr bool is_order_invariant(FeatureKind kind) {
  return kind == FeatureKind::SP || kind == FeatureKind::HOG || kind == FeatureKind::HPOD;
}

constexpr std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::ST: return "st";
    case FeatureKind::DFT: return "dft";
    case FeatureKind::DCT: return "dct";
    case FeatureKind::DWT: return "dwt";
    case FeatureKind::SP: return "sp";
    case FeatureKind::HOG: return "hog";
    case FeatureKind::HPOD: return "hpod";
  }
  return "?";
}

inline FeatureKind parse_feature_kind(std::string_view name) {
  for (FeatureKind k : kAllFeatureKinds) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown feature kind '" + std::string(name) +
                   "' (expected st|dft|dct|dwt|sp|hog|hpod)");
}

/// (width, height) span features appended to every feature vector.
using Spans = std::pair<double, double>;

struct FeatureVector {
  FeatureKind kind = FeatureKind::ST;
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline void check_dim(const FeatureVector& v) {
  if (v.dim() != expected_dim(v.kind)) {
    throw DimensionError(std::string(to_string(v.kind)) + " feature has dimension " +
                         std::to_string(v.dim()) + ", expected " +
                         std::to_string(expected_dim(v.kind)));
  }
}

}  // namespace hpod
