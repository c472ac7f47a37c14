#pragma once

// Features read off the character matrix in writing order. All of them change
// when a stroke is reversed or the strokes are reordered.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hpod/error.hpp"
#include "hpod/feature_vector.hpp"
#include "hpod/ink.hpp"
#include "hpod/transforms.hpp"

namespace hpod {

inline constexpr std::size_t kTemporalPoints = 128;
inline constexpr int kDefaultDwtLevels = 7;

inline std::vector<double> append_spans(std::vector<double> v, const InkCharacter& c) {
  const auto [w, h] = span_features(c);
  v.push_back(w);
  v.push_back(h);
  return v;
}

namespace detail {

inline void require_temporal_rows(const CharacterMatrix& cm) {
  if (cm.size() != kTemporalPoints) {
    throw DimensionError("temporal features need " + std::to_string(kTemporalPoints) +
                         " points, got " + std::to_string(cm.size()));
  }
}

inline FeatureVector finish(FeatureKind kind, std::vector<double> first,
                            const std::vector<double>& second, Spans spans) {
  first.insert(first.end(), second.begin(), second.end());
  first.push_back(spans.first);
  first.push_back(spans.second);
  return {kind, std::move(first)};
}

}  // namespace detail

/// x-column, then y-column, then spans.
inline FeatureVector st_features(const CharacterMatrix& cm, Spans spans) {
  detail::require_temporal_rows(cm);
  return detail::finish(FeatureKind::ST, cm.column_x(), cm.column_y(), spans);
}

/// DFT of x + iy: real parts, then imaginary parts, then spans.
inline FeatureVector dft_features(const CharacterMatrix& cm, Spans spans) {
  detail::require_temporal_rows(cm);
  const ComplexSequence spectrum = dft({cm.column_x(), cm.column_y()});
  return detail::finish(FeatureKind::DFT, spectrum.re, spectrum.im, spans);
}

inline FeatureVector dct_features(const CharacterMatrix& cm, Spans spans) {
  detail::require_temporal_rows(cm);
  return detail::finish(FeatureKind::DCT, dct2(cm.column_x()), dct2(cm.column_y()), spans);
}

inline FeatureVector dwt_features(const CharacterMatrix& cm, Spans spans,
                                  int levels = kDefaultDwtLevels) {
  detail::require_temporal_rows(cm);
  return detail::finish(FeatureKind::DWT, haar_dwt(cm.column_x(), levels),
                        haar_dwt(cm.column_y(), levels), spans);
}

/// Inverts a DFT/DCT/DWT feature vector back to the point sequence it was
/// computed from (stroke boundaries are not recoverable and are left empty).
inline CharacterMatrix recover_character_matrix(const FeatureVector& f,
                                                int dwt_levels = kDefaultDwtLevels) {
  check_dim(f);
  const std::size_t n = kTemporalPoints;
  const std::span<const double> all(f.values);
  const auto first = all.subspan(0, n);
  const auto second = all.subspan(n, n);
  std::vector<double> xs;
  std::vector<double> ys;
  switch (f.kind) {
    case FeatureKind::ST:
      xs.assign(first.begin(), first.end());
      ys.assign(second.begin(), second.end());
      break;
    case FeatureKind::DFT: {
      ComplexSequence s = idft({{first.begin(), first.end()}, {second.begin(), second.end()}});
      xs = std::move(s.re);
      ys = std::move(s.im);
      break;
    }
    case FeatureKind::DCT:
      xs = idct2(first);
      ys = idct2(second);
      break;
    case FeatureKind::DWT:
      xs = haar_idwt(first, dwt_levels);
      ys = haar_idwt(second, dwt_levels);
      break;
    default:
      throw UsageError(std::string(to_string(f.kind)) + " features are not invertible");
  }
  CharacterMatrix cm;
  cm.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cm.rows.push_back({xs[i], ys[i]});
  return cm;
}

}  // namespace hpod
