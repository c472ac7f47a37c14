#pragma once

// Binary model container, all integers little-endian, doubles as their IEEE
// bit patterns:
//   magic "HPODSVM1" | u32 version | u32 kind | f64 width | f64 penalty
//   u32 n_labels { u32 len, bytes }
//   u32 n_vectors | u32 dim | f64[n_vectors * dim]
//   u32 n_machines { i32 first, i32 second, u8 converged, f64 bias,
//                    u32 n_sv, u32[n_sv] pool index, f64[n_sv] coef }
//   u32 crc32 of every preceding byte

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "hpod/error.hpp"
#include "hpod/ink_io.hpp"
#include "hpod/svm.hpp"

namespace hpod {

inline constexpr std::string_view kModelMagic = "HPODSVM1";
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void raw(std::string_view s) { bytes_.append(s); }

  std::string& bytes() { return bytes_; }

 private:
  std::string bytes_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string raw(std::size_t n) {
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw IntegrityError(source_ + ": model file is truncated");
  }

  std::string_view bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace detail

inline std::string serialize_model(const SvmModel& m) {
  detail::ByteWriter w;
  w.raw(kModelMagic);
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(m.kind));
  w.f64(m.kernel.width);
  w.f64(m.kernel.penalty);
  w.u32(static_cast<std::uint32_t>(m.labels.size()));
  for (const auto& l : m.labels) {
    w.u32(static_cast<std::uint32_t>(l.size()));
    w.raw(l);
  }
  w.u32(static_cast<std::uint32_t>(m.vectors.size()));
  w.u32(static_cast<std::uint32_t>(m.dim()));
  for (const auto& v : m.vectors) {
    if (v.size() != m.dim()) throw DimensionError("support vector has the wrong dimension");
    for (double x : v) w.f64(x);
  }
  w.u32(static_cast<std::uint32_t>(m.machines.size()));
  for (const auto& mc : m.machines) {
    w.u32(static_cast<std::uint32_t>(mc.first));
    w.u32(static_cast<std::uint32_t>(mc.second));
    w.u8(mc.converged ? 1 : 0);
    w.f64(mc.bias);
    w.u32(static_cast<std::uint32_t>(mc.support.size()));
    for (auto s : mc.support) w.u32(s);
    for (double c : mc.coef) w.f64(c);
  }
  const std::uint32_t crc = detail::crc32_of(w.bytes());
  w.u32(crc);
  return std::move(w.bytes());
}

inline SvmModel deserialize_model(std::string_view bytes, const std::string& source = "model") {
  if (bytes.size() < kModelMagic.size() + 8 || bytes.substr(0, kModelMagic.size()) != kModelMagic) {
    throw ParseError(source + ": not an hpod model file");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  detail::ByteReader trailer(bytes.substr(bytes.size() - 4), source);
  if (trailer.u32() != detail::crc32_of(body)) {
    throw IntegrityError(source + ": checksum mismatch, model file is corrupted");
  }

  detail::ByteReader r(body, source);
  r.raw(kModelMagic.size());
  const std::uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw VersionError(source + ": unsupported model version " + std::to_string(version));
  }
  SvmModel m;
  const std::uint32_t kind = r.u32();
  if (kind >= kAllFeatureKinds.size()) throw IntegrityError(source + ": unknown feature kind");
  m.kind = static_cast<FeatureKind>(kind);
  m.kernel.width = r.f64();
  m.kernel.penalty = r.f64();
  const std::uint32_t n_labels = r.u32();
  for (std::uint32_t i = 0; i < n_labels; ++i) m.labels.push_back(r.raw(r.u32()));
  const std::uint32_t n_vectors = r.u32();
  const std::uint32_t dim = r.u32();
  if (dim != m.dim()) throw IntegrityError(source + ": support vector dimension does not match kind");
  m.vectors.reserve(n_vectors);
  for (std::uint32_t i = 0; i < n_vectors; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = r.f64();
    m.vectors.push_back(std::move(v));
  }
  const std::uint32_t n_machines = r.u32();
  const std::size_t nc = m.labels.size();
  if (nc < 2 || n_machines != nc * (nc - 1) / 2) {
    throw IntegrityError(source + ": machine count does not match the class count");
  }
  for (std::uint32_t i = 0; i < n_machines; ++i) {
    PairwiseMachine mc;
    mc.first = static_cast<std::int32_t>(r.u32());
    mc.second = static_cast<std::int32_t>(r.u32());
    mc.converged = r.u8() != 0;
    mc.bias = r.f64();
    const std::uint32_t n_sv = r.u32();
    mc.support.resize(n_sv);
    for (auto& s : mc.support) {
      s = r.u32();
      if (s >= n_vectors) throw IntegrityError(source + ": support index out of range");
    }
    mc.coef.resize(n_sv);
    for (auto& c : mc.coef) c = r.f64();
    m.machines.push_back(std::move(mc));
  }
  if (!r.done()) throw IntegrityError(source + ": trailing bytes after model data");
  for (int a = 1; a <= m.n_classes(); ++a) {
    for (int b = a + 1; b <= m.n_classes(); ++b) m.machine(a, b);
  }
  return m;
}

inline void save_model(const SvmModel& m, const std::string& path) {
  detail::write_file(path, serialize_model(m));
}

inline SvmModel load_model(const std::string& path) {
  return deserialize_model(detail::read_file(path), path);
}

}  // namespace hpod
