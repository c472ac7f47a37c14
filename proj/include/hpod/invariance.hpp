#pragma once

// Feature response to stroke reversal and stroke reordering. Each character
// is preprocessed once and the perturbations are applied to the processed
// strokes, so every variant shares the same point geometry.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hpod/feature_vector.hpp"
#include "hpod/pipeline.hpp"
#include "hpod/synthetic.hpp"

namespace hpod {

inline constexpr double kInvariantTolerance = 1e-9;
inline constexpr double kVariantThreshold = 1e-6;

struct Deviation {
  double linf = 0.0;
  double l2 = 0.0;
};

inline Deviation deviation(const FeatureVector& a, const FeatureVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("deviation: feature dimensions differ");
  Deviation d;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double e = std::abs(a.values[i] - b.values[i]);
    d.linf = std::max(d.linf, e);
    d.l2 += e * e;
  }
  d.l2 = std::sqrt(d.l2);
  return d;
}

struct InvarianceCase {
  std::size_t character = 0;
  std::string perturbation;  // "reverse", "permute" or "mixed"
  Deviation dev;
  bool pass = true;
};

struct InvarianceReport {
  FeatureKind kind = FeatureKind::HPOD;
  std::vector<InvarianceCase> cases;
  std::vector<std::string> notes;
  double max_linf = 0.0;
  double min_l2 = 0.0;  // smallest change over cases that reorder points
  bool passed = true;
};

/// Order-invariant kinds pass when every deviation is below
/// kInvariantTolerance in L-infinity. The other kinds pass when every
/// perturbation that actually reorders the points changes the features by
/// more than kVariantThreshold in L2. Single-point characters are skipped.
inline InvarianceReport check_invariance(const std::vector<InkCharacter>& chars,
                                         const PipelineConfig& cfg, int trials,
                                         std::uint64_t seed) {
  if (trials < 1) throw DomainError("invariance check needs at least one trial");
  InvarianceReport report;
  report.kind = cfg.kind;
  report.min_l2 = std::numeric_limits<double>::infinity();
  const bool invariant = is_order_invariant(cfg.kind);

  for (std::size_t i = 0; i < chars.size(); ++i) {
    const InkCharacter& c = chars[i];
    validate(c);
    const InkCharacter p = preprocess(c, cfg.preprocess);
    if (p.point_count() < 2) {
      report.notes.push_back("character " + std::to_string(i) + " skipped: single point");
      continue;
    }
    const FeatureVector base = extract_preprocessed(p, cfg);
    const CharacterMatrix base_rows = character_matrix(p);

    auto run = [&](const char* name, const PerturbationSpec& spec, std::uint64_t s) {
      const InkCharacter q = perturb(p, spec, s);
      InvarianceCase k{i, name, deviation(base, extract_preprocessed(q, cfg)), true};
      if (invariant) {
        k.pass = k.dev.linf < kInvariantTolerance;
      } else if (character_matrix(q).rows != base_rows.rows) {
        k.pass = k.dev.l2 > kVariantThreshold;
        report.min_l2 = std::min(report.min_l2, k.dev.l2);
      }
      report.max_linf = std::max(report.max_linf, k.dev.linf);
      report.passed = report.passed && k.pass;
      report.cases.push_back(std::move(k));
    };

    run("reverse", {1.0, false, 0.0}, seed);
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t s = seed + 7919u * i + static_cast<std::uint64_t>(t);
      if (p.strokes.size() >= 2) run("permute", {0.0, true, 0.0}, s);
      run("mixed", {0.5, true, 0.0}, s);
    }
  }
  if (report.min_l2 == std::numeric_limits<double>::infinity()) report.min_l2 = 0.0;
  return report;
}

}  // namespace hpod
