#pragma once

// Seeded synthetic handwriting: per-class polyline templates, per-sample
// deformation, writing-order perturbations, and train/test splitting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hpod/error.hpp"
#include "hpod/ink.hpp"
#include "hpod/preprocess.hpp"

namespace hpod {

/// Seeded random source. Distributions are computed here from the raw engine
/// output so the streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform on {0, ..., n - 1}.
  std::size_t index(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
  }

  /// Standard normal by Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Templates

using Template = std::vector<Stroke>;

namespace detail {

inline double point_segment_distance(const InkPoint& p, const InkPoint& a, const InkPoint& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

inline double distance_to_polylines(const InkPoint& p, const Template& t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : t) {
    if (s.size() == 1) best = std::min(best, distance(p, s.front()));
    for (std::size_t i = 1; i < s.size(); ++i) {
      best = std::min(best, point_segment_distance(p, s[i - 1], s[i]));
    }
  }
  return best;
}

inline Template densify(const Template& t, double step) {
  Template out;
  for (const auto& s : t) out.push_back(resample_spacing(s, step));
  return out;
}

inline double directed_hausdorff(const Template& dense_a, const Template& b) {
  double worst = 0.0;
  for (const auto& s : dense_a) {
    for (const auto& p : s) worst = std::max(worst, distance_to_polylines(p, b));
  }
  return worst;
}

inline Stroke sample_curve(Rng& rng) {
  constexpr int kSamples = 32;
  Stroke s;
  switch (rng.index(3)) {
    case 0: {  // straight segment
      InkPoint a{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
      InkPoint b{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
      while (distance(a, b) < 0.35) b = {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
      for (int i = 0; i < kSamples; ++i) s.push_back(lerp(a, b, i / double(kSamples - 1)));
      break;
    }
    case 1: {  // circular arc
      const double r = rng.uniform(0.15, 0.4);
      const InkPoint c{rng.uniform(r, 1.0 - r), rng.uniform(r, 1.0 - r)};
      const double start = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double sweep = rng.uniform(0.5, 1.7) * std::numbers::pi * (rng.uniform() < 0.5 ? -1 : 1);
      for (int i = 0; i < kSamples; ++i) {
        const double a = start + sweep * i / double(kSamples - 1);
        s.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
      }
      break;
    }
    default: {  // quadratic Bezier
      InkPoint p0{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
      InkPoint p1{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
      InkPoint p2{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
      while (distance(p0, p2) < 0.35) p2 = {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
      for (int i = 0; i < kSamples; ++i) {
        const double t = i / double(kSamples - 1);
        const double u = 1.0 - t;
        s.push_back({u * u * p0.x + 2 * u * t * p1.x + t * t * p2.x,
                     u * u * p0.y + 2 * u * t * p1.y + t * t * p2.y});
      }
      break;
    }
  }
  return s;
}

}  // namespace detail

/// Symmetric Hausdorff distance between two polyline sets. Points of each
/// side are taken at spacing `step` and measured against the other side's
/// segments, so the result never exceeds the exact distance.
inline double hausdorff_distance(const Template& a, const Template& b, double step = 0.005) {
  return std::max(detail::directed_hausdorff(detail::densify(a, step), b),
                  detail::directed_hausdorff(detail::densify(b, step), a));
}

inline constexpr double kMinTemplateSeparation = 0.1;
inline constexpr double kMinTemplateExtent = 0.3;

/// `class_count` templates of 1-4 strokes each, normalized to the unit square
/// and pairwise at least kMinTemplateSeparation apart in Hausdorff distance.
inline std::vector<Template> synthetic_templates(int class_count, std::uint64_t seed) {
  if (class_count < 2) throw DomainError("synthetic data needs at least two classes");
  Rng rng(seed, 0);
  std::vector<Template> out;
  while (static_cast<int>(out.size()) < class_count) {
    Template t;
    const std::size_t n_strokes = 1 + rng.index(4);
    for (std::size_t s = 0; s < n_strokes; ++s) t.push_back(detail::sample_curve(rng));
    // Per-axis normalization would blow up a nearly flat template.
    InkCharacter probe;
    probe.strokes = std::move(t);
    probe = normalize_coordinates(probe);
    if (*probe.raw_width < kMinTemplateExtent || *probe.raw_height < kMinTemplateExtent) continue;
    t = std::move(probe.strokes);
    const bool distinct = std::all_of(out.begin(), out.end(), [&](const Template& o) {
      return hausdorff_distance(t, o) >= kMinTemplateSeparation;
    });
    if (distinct) out.push_back(std::move(t));
  }
  return out;
}

struct SyntheticOptions {
  double affine = 0.18;      // max scale/shear perturbation
  double rotation_deg = 12.0;
  double warp = 0.06;        // amplitude of the smooth displacement field
  double jitter = 0.01;      // per-point Gaussian noise
};

inline std::string synthetic_label(int class_index) {
  std::string digits = std::to_string(class_index);
  return "c" + std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') + digits;
}

/// One deformed instance of `t`, in raw (unnormalized) coordinates.
inline InkCharacter deform(const Template& t, Rng& rng, const SyntheticOptions& opt = {}) {
  const double sx = 1.0 + rng.uniform(-opt.affine, opt.affine);
  const double sy = 1.0 + rng.uniform(-opt.affine, opt.affine);
  const double shear = rng.uniform(-opt.affine, opt.affine);
  const double rot = rng.uniform(-opt.rotation_deg, opt.rotation_deg) * std::numbers::pi / 180.0;
  const double fx = rng.uniform(0.5, 1.5);
  const double fy = rng.uniform(0.5, 1.5);
  const double px = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double py = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double ax = rng.uniform(-opt.warp, opt.warp);
  const double ay = rng.uniform(-opt.warp, opt.warp);
  const double size = rng.uniform(80.0, 160.0);
  const double ox = rng.uniform(0.0, 500.0);
  const double oy = rng.uniform(0.0, 500.0);

  InkCharacter c;
  for (const auto& s : t) {
    Stroke out;
    for (const auto& p : s) {
      double x = p.x - 0.5 + ax * std::sin(2.0 * std::numbers::pi * fy * p.y + py);
      double y = p.y - 0.5 + ay * std::sin(2.0 * std::numbers::pi * fx * p.x + px);
      x = sx * x + shear * y;
      y = sy * y;
      const double xr = std::cos(rot) * x - std::sin(rot) * y;
      const double yr = std::sin(rot) * x + std::cos(rot) * y;
      out.push_back({ox + size * (xr + opt.jitter * rng.normal()),
                     oy + size * (yr + opt.jitter * rng.normal())});
    }
    c.strokes.push_back(std::move(out));
  }
  return c;
}

/// class_count * per_class labelled characters, grouped by class. A pure
/// function of its arguments; each class draws from its own random stream.
inline std::vector<InkCharacter> generate_synthetic(int class_count, int per_class,
                                                    std::uint64_t seed,
                                                    const SyntheticOptions& opt = {}) {
  if (per_class < 0) throw DomainError("per_class must be non-negative");
  const auto templates = synthetic_templates(class_count, seed);
  std::vector<InkCharacter> out;
  out.reserve(static_cast<std::size_t>(class_count) * static_cast<std::size_t>(per_class));
  for (int k = 0; k < class_count; ++k) {
    Rng rng(seed, static_cast<std::uint64_t>(k) + 1);
    for (int i = 0; i < per_class; ++i) {
      InkCharacter c = deform(templates[static_cast<std::size_t>(k)], rng, opt);
      c.label = synthetic_label(k);
      out.push_back(std::move(c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Perturbation

struct PerturbationSpec {
  double reverse_stroke_prob = 0.0;
  bool permute_strokes = false;
  double jitter_sigma = 0.0;
};

/// Reverses each stroke with probability reverse_stroke_prob, optionally
/// reorders the strokes (never the identity order when there are two or
/// more), then adds Gaussian jitter. With zero jitter the point multiset is
/// unchanged.
inline InkCharacter perturb(const InkCharacter& c, const PerturbationSpec& spec,
                            std::uint64_t seed) {
  validate(c);
  if (!(spec.reverse_stroke_prob >= 0.0 && spec.reverse_stroke_prob <= 1.0)) {
    throw DomainError("reverse_stroke_prob must lie in [0, 1]");
  }
  if (!(spec.jitter_sigma >= 0.0)) throw DomainError("jitter_sigma must be non-negative");
  Rng rng(seed);
  InkCharacter out = c;
  for (auto& s : out.strokes) {
    if (rng.uniform() < spec.reverse_stroke_prob) std::reverse(s.begin(), s.end());
  }
  const std::size_t n = out.strokes.size();
  if (spec.permute_strokes && n >= 2) {
    std::vector<std::size_t> order(n);
    bool identity = true;
    while (identity) {
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
      identity = std::is_sorted(order.begin(), order.end());
    }
    std::vector<Stroke> reordered;
    for (std::size_t i : order) reordered.push_back(std::move(out.strokes[i]));
    out.strokes = std::move(reordered);
  }
  if (spec.jitter_sigma > 0.0) {
    for (auto& s : out.strokes) {
      for (auto& p : s) {
        p.x += spec.jitter_sigma * rng.normal();
        p.y += spec.jitter_sigma * rng.normal();
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitSpec {
  double train_fraction = 0.82;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct SplitResult {
  std::vector<InkCharacter> train;
  std::vector<InkCharacter> test;
  std::vector<std::string> warnings;
};

/// Disjoint, exhaustive split; both sides keep the input order. Stratified
/// splits round each class's share and keep at least one sample per side; a
/// class with a single sample goes to train with a warning.
inline SplitResult split(const std::vector<InkCharacter>& chars, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw DomainError("train_fraction must lie in (0, 1)");
  }
  Rng rng(spec.seed);
  auto shuffled = [&](std::vector<std::size_t> v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
    return v;
  };

  SplitResult r;
  std::vector<bool> to_train(chars.size(), false);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::string> group_names;
  if (spec.stratified) {
    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < chars.size(); ++i) {
      const std::string key = chars[i].label.value_or("");
      const auto [it, inserted] = group_of.emplace(key, groups.size());
      if (inserted) {
        groups.emplace_back();
        group_names.push_back(key);
      }
      groups[it->second].push_back(i);
    }
  } else {
    groups.emplace_back(chars.size());
    for (std::size_t i = 0; i < chars.size(); ++i) groups[0][i] = i;
    group_names.emplace_back();
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto idx = shuffled(groups[g]);
    const std::size_t n = idx.size();
    auto n_train = static_cast<std::size_t>(std::lround(spec.train_fraction * static_cast<double>(n)));
    if (spec.stratified) {
      if (n == 1) {
        r.warnings.push_back("class '" + group_names[g] + "' has one sample; assigned to train");
        n_train = 1;
      } else {
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
      }
    }
    for (std::size_t k = 0; k < n_train; ++k) to_train[idx[k]] = true;
  }
  for (std::size_t i = 0; i < chars.size(); ++i) {
    (to_train[i] ? r.train : r.test).push_back(chars[i]);
  }
  return r;
}

}  // namespace hpod
