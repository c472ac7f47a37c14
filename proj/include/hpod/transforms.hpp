#pragma once

// Direct O(N^2) DFT and DCT-II plus a multi-level orthonormal Haar wavelet.
// Sequences here are 128 samples long, so no fast algorithms are needed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hpod/error.hpp"

namespace hpod {

struct ComplexSequence {
  std::vector<double> re;
  std::vector<double> im;

  std::size_t size() const { return re.size(); }

  friend bool operator==(const ComplexSequence&, const ComplexSequence&) = default;
};

namespace detail {

inline ComplexSequence dft_impl(const ComplexSequence& in, double sign, double scale) {
  if (in.re.size() != in.im.size()) {
    throw DimensionError("complex sequence has mismatched real/imaginary lengths");
  }
  const std::size_t n = in.size();
  if (n == 0) throw DimensionError("transform of an empty sequence");
  ComplexSequence out{std::vector<double>(n), std::vector<double>(n)};
  const double w = sign * 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc_re = 0.0;
    double acc_im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      // Reduce k*t mod n first so the twiddle angle stays small and exact.
      const double angle = w * static_cast<double>((k * t) % n);
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      acc_re += in.re[t] * c - in.im[t] * s;
      acc_im += in.re[t] * s + in.im[t] * c;
    }
    out.re[k] = acc_re * scale;
    out.im[k] = acc_im * scale;
  }
  return out;
}

}  // namespace detail

/// Unnormalized forward DFT: X[k] = sum_t x[t] exp(-2 pi i k t / N).
inline ComplexSequence dft(const ComplexSequence& seq) {
  return detail::dft_impl(seq, -1.0, 1.0);
}

/// Inverse of dft(), carrying the 1/N factor.
inline ComplexSequence idft(const ComplexSequence& seq) {
  return detail::dft_impl(seq, 1.0, 1.0 / static_cast<double>(seq.size()));
}

/// Orthonormal DCT-II.
inline std::vector<double> dct2(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw DimensionError("transform of an empty sequence");
  std::vector<double> out(n);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += x[t] * std::cos(std::numbers::pi * (2.0 * static_cast<double>(t) + 1.0) *
                             static_cast<double>(k) / (2.0 * nn));
    }
    out[k] = acc * (k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn));
  }
  return out;
}

/// Inverse of dct2() (an orthonormal DCT-III).
inline std::vector<double> idct2(std::span<const double> coeffs) {
  const std::size_t n = coeffs.size();
  if (n == 0) throw DimensionError("transform of an empty sequence");
  std::vector<double> out(n);
  const double nn = static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = coeffs[0] * std::sqrt(1.0 / nn);
    for (std::size_t k = 1; k < n; ++k) {
      acc += coeffs[k] * std::sqrt(2.0 / nn) *
             std::cos(std::numbers::pi * (2.0 * static_cast<double>(t) + 1.0) *
                      static_cast<double>(k) / (2.0 * nn));
    }
    out[t] = acc;
  }
  return out;
}

/// Multi-level orthonormal Haar (two-tap Daubechies) analysis.
///
/// Each level splits the current approximation band into pairwise sums and
/// differences scaled by 1/sqrt(2). Output layout is
/// [approx_L, detail_L, detail_{L-1}, ..., detail_1].
inline std::vector<double> haar_dwt(std::span<const double> x, int levels) {
  if (levels < 0) throw DomainError("haar_dwt: negative level count");
  const std::size_t n = x.size();
  const std::size_t block = std::size_t{1} << levels;
  if (n == 0 || n % block != 0) {
    throw DimensionError("haar_dwt: length " + std::to_string(n) +
                         " is not a multiple of 2^" + std::to_string(levels));
  }
  std::vector<double> out(x.begin(), x.end());
  std::vector<double> tmp(n);
  const double r = 1.0 / std::numbers::sqrt2;
  for (std::size_t len = n; len > n / block; len /= 2) {
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
      tmp[i] = (out[2 * i] + out[2 * i + 1]) * r;
      tmp[half + i] = (out[2 * i] - out[2 * i + 1]) * r;
    }
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), out.begin());
  }
  return out;
}

inline std::vector<double> haar_idwt(std::span<const double> coeffs, int levels) {
  if (levels < 0) throw DomainError("haar_idwt: negative level count");
  const std::size_t n = coeffs.size();
  const std::size_t block = std::size_t{1} << levels;
  if (n == 0 || n % block != 0) {
    throw DimensionError("haar_idwt: length " + std::to_string(n) +
                         " is not a multiple of 2^" + std::to_string(levels));
  }
  std::vector<double> out(coeffs.begin(), coeffs.end());
  std::vector<double> tmp(n);
  const double r = 1.0 / std::numbers::sqrt2;
  for (std::size_t len = 2 * (n / block); len <= n; len *= 2) {
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
      tmp[2 * i] = (out[i] + out[half + i]) * r;
      tmp[2 * i + 1] = (out[i] - out[half + i]) * r;
    }
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), out.begin());
  }
  return out;
}

}  // namespace hpod
