// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hpod/ink_io.hpp"
#include "hpod/invariance.hpp"
#include "hpod/model_io.hpp"
#include "hpod/pipeline.hpp"
#include "hpod/spatial_features.hpp"
#include "hpod/synthetic.hpp"
#include "hpod/transforms.hpp"
#include "histogram_oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace hpod;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << v;
  return ss.str();
}

std::string fixed1(double fraction) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << fraction * 100.0;
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome dimension_conformance() {
  const std::vector<std::pair<FeatureKind, std::size_t>> table = {
      {FeatureKind::ST, 258}, {FeatureKind::DFT, 258}, {FeatureKind::DCT, 258},
      {FeatureKind::DWT, 258}, {FeatureKind::SP, 786}, {FeatureKind::HOG, 326},
      {FeatureKind::HPOD, 722}};
  std::vector<InkCharacter> chars = generate_synthetic(20, 5, 101);
  std::mt19937_64 rng(102);
  for (int i = 0; i < 50; ++i) chars.push_back(test::random_character(rng));
  chars.push_back(test::make_character({{{0.3, 0.7}}}));
  chars.push_back(test::make_character({{{0, 0}, {1, 1}}}));
  chars.push_back(test::make_character({{{0, 0}, {0, 5}}, {{0, 5}}}));
  chars.push_back(test::make_character({{{-40, 12}, {900, 12}}}));

  Outcome o;
  std::size_t checked = 0;
  for (const auto& [kind, dim] : table) {
    for (const auto& c : chars) {
      const auto f = extract(c, kind);
      ++checked;
      if (f.dim() != dim) {
        o.pass = false;
        o.detail = std::string(to_string(kind)) + " gave " + std::to_string(f.dim());
        return o;
      }
    }
  }
  o.detail = std::to_string(checked) + " extractions over " + std::to_string(chars.size()) +
             " characters, dims 258/258/258/258/786/326/722";
  return o;
}

Outcome invariance_suite() {
  const auto chars = generate_synthetic(40, 5, 202);
  Outcome o;
  std::ostringstream ss;
  double worst_invariant = 0.0;
  double least_variant = std::numeric_limits<double>::infinity();
  std::size_t cases = 0;
  for (FeatureKind k : kAllFeatureKinds) {
    const auto r = check_invariance(chars, default_pipeline(k), 2, 203);
    cases += r.cases.size();
    if (!r.passed) {
      o.pass = false;
      ss << to_string(k) << " failed; ";
    }
    if (is_order_invariant(k)) {
      worst_invariant = std::max(worst_invariant, r.max_linf);
    } else {
      least_variant = std::min(least_variant, r.min_l2);
    }
  }
  ss << chars.size() << " characters, " << cases << " cases; spatial max linf "
     << fmt(worst_invariant) << " (< 1e-9), temporal min l2 " << fmt(least_variant)
     << " (> 1e-6)";
  o.pass = o.pass && worst_invariant < 1e-9 && least_variant > 1e-6;
  o.detail = ss.str();
  return o;
}

Outcome transform_round_trips() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto vec = [&] {
    std::vector<double> v(128);
    for (auto& x : v) x = u(rng);
    return v;
  };
  double err_dft = 0.0;
  double err_dct = 0.0;
  double err_dwt = 0.0;
  double err_parseval = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ComplexSequence x{vec(), vec()};
    const auto s = dft(x);
    const auto back = idft(s);
    double te = 0.0;
    double fe = 0.0;
    for (std::size_t i = 0; i < 128; ++i) {
      err_dft = std::max({err_dft, std::abs(back.re[i] - x.re[i]), std::abs(back.im[i] - x.im[i])});
      te += x.re[i] * x.re[i] + x.im[i] * x.im[i];
      fe += s.re[i] * s.re[i] + s.im[i] * s.im[i];
    }
    err_parseval = std::max(err_parseval, std::abs(fe / 128.0 - te) / te);

    const auto r = vec();
    const auto c = idct2(dct2(r));
    const auto w = haar_idwt(haar_dwt(r, 7), 7);
    for (std::size_t i = 0; i < 128; ++i) {
      err_dct = std::max(err_dct, std::abs(c[i] - r[i]));
      err_dwt = std::max(err_dwt, std::abs(w[i] - r[i]));
    }
  }
  Outcome o;
  o.pass = err_dft < 1e-9 && err_dct < 1e-9 && err_dwt < 1e-9 && err_parseval < 1e-9;
  o.detail = "1000 vectors; max abs error dft " + fmt(err_dft) + ", dct " + fmt(err_dct) +
             ", dwt " + fmt(err_dwt) + "; Parseval rel " + fmt(err_parseval);
  return o;
}

Outcome histogram_oracle() {
  const CellGrid cells{6, 6, 3};
  const auto q = AngleQuantizer::with_step(20.0);
  const auto grid = SpatialGridConfig::from_step(kHpodStep);
  std::mt19937_64 rng(404);
  std::size_t mismatches = 0;
  auto check_maps = [&](const SpatialMaps& m) {
    mismatches += point_histogram_counts(m.occupancy, cells) !=
                  test::oracle_point_counts(m.occupancy, 6, 6, 3);
    mismatches += angle_histogram_counts(m.orientation, m.orientation_valid, cells, q) !=
                  test::oracle_angle_counts(m.orientation, m.orientation_valid, 6, 6, 3, 20.0);
    mismatches += angle_histogram_counts(m.dynamics, m.dynamics_valid, cells, q) !=
                  test::oracle_angle_counts(m.dynamics, m.dynamics_valid, 6, 6, 3, 20.0);
    mismatches += hog_cell_histograms(m.occupancy, 6, q, HogVote::Count) !=
                  test::oracle_hog_counts(m.occupancy, 6, 20.0);
  };
  // Maps drawn from ink, then maps with arbitrary cell contents.
  for (int i = 0; i < 100; ++i) {
    const auto p = preprocess(test::random_character(rng), {Spacing{kHpodStep}, 1});
    check_maps(build_spatial_maps(p, grid, 1, 3));
  }
  for (int i = 0; i < 100; ++i) {
    SpatialMaps m(36);
    m.occupancy = test::random_occupancy(rng, 36);
    m.orientation = test::random_angles(rng, 36);
    m.orientation_valid = test::random_occupancy(rng, 36);
    m.dynamics = test::random_angles(rng, 36);
    m.dynamics_valid = test::random_occupancy(rng, 36);
    check_maps(m);
  }
  Outcome o;
  o.pass = mismatches == 0;
  o.detail = "200 maps x {HOG cells, point, orientation, dynamics}: " +
             std::to_string(mismatches) + " mismatches";
  return o;
}

// ---------------------------------------------------------------------------

struct LabelledSet {
  std::vector<FeatureVector> x;
  std::vector<std::string> y;
};

LabelledSet blobs(int classes, int per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-3.0, 3.0);
  std::normal_distribution<double> noise(0.0, 0.15);
  LabelledSet d;
  for (int k = 0; k < classes; ++k) {
    std::vector<double> c(258);
    for (auto& v : c) v = centre(rng);
    for (int i = 0; i < per_class; ++i) {
      FeatureVector f{FeatureKind::ST, c};
      for (auto& v : f.values) v += noise(rng);
      d.x.push_back(std::move(f));
      d.y.push_back("b" + std::to_string(k));
    }
  }
  return d;
}

LabelledSet synthetic_features(FeatureKind kind, int classes, int per_class, std::uint64_t seed) {
  LabelledSet d;
  const auto cfg = default_pipeline(kind);
  for (const auto& c : generate_synthetic(classes, per_class, seed)) {
    d.x.push_back(extract(c, cfg));
    d.y.push_back(*c.label);
  }
  return d;
}

// KKT conditions of every pairwise machine, recomputed from the stored
// support vectors and the raw kernel definition.
struct KktSummary {
  double violation = 0.0;
  double balance = 0.0;
  std::size_t unconverged = 0;
};

KktSummary kkt_of(const SvmModel& m, const LabelledSet& d) {
  KktSummary s;
  const double c = m.kernel.penalty;
  auto kernel = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-sq / (m.kernel.width * m.kernel.width));
  };
  for (const auto& mc : m.machines) {
    s.unconverged += !mc.converged;
    double balance = 0.0;
    for (double v : mc.coef) balance += v;
    s.balance = std::max(s.balance, std::abs(balance));
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      const int cls = *m.class_id(d.y[i]);
      if (cls != mc.first && cls != mc.second) continue;
      const int y = cls == mc.first ? 1 : -1;
      double f = mc.bias;
      double alpha = 0.0;
      for (std::size_t t = 0; t < mc.support.size(); ++t) {
        const auto& sv = m.vectors[mc.support[t]];
        f += mc.coef[t] * kernel(sv, d.x[i].values);
        if (sv == d.x[i].values) alpha = std::abs(mc.coef[t]);
      }
      const double yf = y * f;
      double v = 0.0;
      if (alpha <= 0.0) {
        v = std::max(0.0, 1.0 - yf);
      } else if (alpha >= c) {
        v = std::max(0.0, yf - 1.0);
      } else {
        v = std::abs(yf - 1.0);
      }
      s.violation = std::max(s.violation, v);
    }
  }
  return s;
}

Outcome svm_correctness() {
  Outcome o;
  std::ostringstream ss;
  double worst_kkt = 0.0;
  double worst_balance = 0.0;
  std::size_t machines = 0;
  std::size_t unconverged = 0;
  std::size_t wrong_evals = 0;
  std::size_t train_errors = 0;
  const std::vector<LabelledSet> sets = {blobs(8, 10, 501), blobs(3, 25, 502),
                                         synthetic_features(FeatureKind::HPOD, 10, 6, 503),
                                         synthetic_features(FeatureKind::DFT, 6, 6, 504)};
  for (const auto& d : sets) {
    const auto model = train_multiclass(d.x, d.y, default_kernel(d.x.front().kind));
    const auto k = kkt_of(model, d);
    worst_kkt = std::max(worst_kkt, k.violation);
    worst_balance = std::max(worst_balance, k.balance);
    unconverged += k.unconverged;
    machines += model.machines.size();
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      std::size_t evals = 0;
      const int pred = ddag_predict(model, d.x[i], &evals);
      wrong_evals += evals != static_cast<std::size_t>(model.n_classes() - 1);
      train_errors += pred != *model.class_id(d.y[i]);
    }
  }
  o.pass = worst_kkt <= 1e-3 && worst_balance <= 1e-6 && unconverged == 0 && wrong_evals == 0 &&
           train_errors == 0;
  ss << machines << " machines; max KKT violation " << fmt(worst_kkt) << ", max |sum alpha y| "
     << fmt(worst_balance) << ", unconverged " << unconverged << ", training errors "
     << train_errors << ", walks with evaluations != N-1: " << wrong_evals;
  o.detail = ss.str();
  return o;
}

Outcome end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto chars = generate_synthetic(96, 25, 2024);
  const auto parts = split(chars, {0.8, 7, true});
  auto accuracy = [&](FeatureKind kind) {
    const auto cfg = default_pipeline(kind);
    std::vector<FeatureVector> xtr, xte;
    std::vector<std::string> ytr, yte;
    for (const auto& c : parts.train) {
      xtr.push_back(extract(c, cfg));
      ytr.push_back(*c.label);
    }
    for (const auto& c : parts.test) {
      xte.push_back(extract(c, cfg));
      yte.push_back(*c.label);
    }
    const auto model = train_multiclass(xtr, ytr, cfg.kernel);
    return evaluate_accuracy(model, xte, yte).accuracy;
  };
  const double hpod = accuracy(FeatureKind::HPOD);
  const double sp = accuracy(FeatureKind::SP);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = parts.train.size() == 96u * 20 && parts.test.size() == 96u * 5 && hpod >= 0.95 &&
           hpod > sp;
  o.detail = "96 classes, " + std::to_string(parts.train.size()) + " train / " +
             std::to_string(parts.test.size()) + " test; HPOD " + fixed1(hpod) + "%, SP " +
             fixed1(sp) + "%; " + fmt(secs) + " s";
  return o;
}

Outcome serialization() {
  Outcome o;
  std::ostringstream ss;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("hpod_acceptance_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);

  // Ink: synthetic characters plus coordinates with awkward binary expansions.
  auto chars = generate_synthetic(12, 3, 701);
  std::mt19937_64 rng(702);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 20; ++i) {
    Stroke s;
    for (int p = 0; p < 30; ++p) s.push_back({u(rng) / 3.0, std::ldexp(u(rng), -500)});
    chars.push_back(test::make_character({s, {{0.1, 0.2}, {1e-310, -0.0}}}));
  }
  const auto ink_path = (dir / "chars.json").string();
  save_ink(chars, ink_path);
  const auto ink_back = load_ink(ink_path);
  bool ink_ok = ink_back == chars;
  for (std::size_t i = 0; ink_ok && i < chars.size(); ++i) {
    for (std::size_t s = 0; s < chars[i].strokes.size(); ++s) {
      for (std::size_t p = 0; p < chars[i].strokes[s].size(); ++p) {
        const auto& a = chars[i].strokes[s][p];
        const auto& b = ink_back[i].strokes[s][p];
        ink_ok = ink_ok && std::bit_cast<std::uint64_t>(a.x) == std::bit_cast<std::uint64_t>(b.x) &&
                 std::bit_cast<std::uint64_t>(a.y) == std::bit_cast<std::uint64_t>(b.y);
      }
    }
  }
  ss << chars.size() << " characters " << (ink_ok ? "bit-identical" : "DIFFER");

  // Models: identical predictions and vote rankings on 100 probes.
  std::size_t differing = 0;
  bool models_equal = true;
  for (FeatureKind kind : {FeatureKind::HPOD, FeatureKind::DCT}) {
    const auto d = synthetic_features(kind, 6, 5, 703);
    const auto model = train_multiclass(d.x, d.y, default_kernel(kind));
    const auto path = (dir / (std::string(to_string(kind)) + ".model")).string();
    save_model(model, path);
    const auto loaded = load_model(path);
    models_equal = models_equal && loaded == model;
    const auto probes = generate_synthetic(6, 17, 704);
    for (std::size_t i = 0; i < 100; ++i) {
      const auto f = extract(probes[i], kind);
      differing += ddag_predict(model, f) != ddag_predict(loaded, f);
      const auto va = rank_by_votes(model, f);
      const auto vb = rank_by_votes(loaded, f);
      bool same = va.size() == vb.size();
      for (std::size_t k = 0; same && k < va.size(); ++k) {
        same = va[k].class_id == vb[k].class_id && va[k].votes == vb[k].votes;
      }
      differing += !same;
    }
  }
  ss << "; models " << (models_equal ? "identical" : "DIFFER") << ", " << differing
     << " differing predictions on 2 x 100 probes";
  std::filesystem::remove_all(dir);
  o.pass = ink_ok && models_equal && differing == 0;
  o.detail = ss.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dimension conformance", dimension_conformance},
      {"invariance suite", invariance_suite},
      {"transform round-trips", transform_round_trips},
      {"histogram oracle equivalence", histogram_oracle},
      {"svm correctness", svm_correctness},
      {"end-to-end desk-scale experiment", end_to_end},
      {"serialization round-trips", serialization},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << i + 1 << ' ' << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << ": " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
