#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "hpod/preprocess.hpp"
#include "hpod/spatial_map.hpp"
#include "hpod/synthetic.hpp"
#include "test_support.hpp"

namespace hpod {
namespace {

std::vector<InkPoint> sorted_points(const InkCharacter& c) {
  std::vector<InkPoint> pts;
  for (const auto& s : c.strokes) pts.insert(pts.end(), s.begin(), s.end());
  std::sort(pts.begin(), pts.end(), [](const InkPoint& a, const InkPoint& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  return pts;
}

// Oracle: Hausdorff distance between densely sampled point sets, accurate to
// half the sampling step.
double point_set_hausdorff(const Template& a, const Template& b, double step) {
  auto dense = [&](const Template& t) {
    std::vector<InkPoint> out;
    for (const auto& s : t) {
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double len = std::hypot(s[i + 1].x - s[i].x, s[i + 1].y - s[i].y);
        const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 0; k < n; ++k) {
          const double t01 = static_cast<double>(k) / n;
          out.push_back({s[i].x + t01 * (s[i + 1].x - s[i].x), s[i].y + t01 * (s[i + 1].y - s[i].y)});
        }
      }
      out.push_back(s.back());
    }
    return out;
  };
  const auto pa = dense(a);
  const auto pb = dense(b);
  auto directed = [](const std::vector<InkPoint>& from, const std::vector<InkPoint>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = 1e300;
      for (const auto& q : to) best = std::min(best, (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

TEST(Synthetic, DeterministicPerSeed) {
  EXPECT_EQ(generate_synthetic(5, 3, 42), generate_synthetic(5, 3, 42));
  EXPECT_NE(generate_synthetic(5, 3, 42), generate_synthetic(5, 3, 43));
}

TEST(Synthetic, CountsAndLabels) {
  const auto chars = generate_synthetic(96, 20, 1);
  ASSERT_EQ(chars.size(), 1920u);
  std::map<std::string, int> per;
  for (const auto& c : chars) {
    ASSERT_TRUE(c.label.has_value());
    ++per[*c.label];
    EXPECT_GE(c.strokes.size(), 1u);
    EXPECT_LE(c.strokes.size(), 4u);
  }
  EXPECT_EQ(per.size(), 96u);
  for (const auto& [label, n] : per) EXPECT_EQ(n, 20) << label;
  EXPECT_EQ(chars.front().label, "c000");
  EXPECT_EQ(chars.back().label, "c095");
}

TEST(Synthetic, TemplatesPairwiseDistinct) {
  const auto templates = synthetic_templates(20, 9);
  const double step = 0.002;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    for (std::size_t j = i + 1; j < templates.size(); ++j) {
      EXPECT_GE(point_set_hausdorff(templates[i], templates[j], step),
                kMinTemplateSeparation - step / 2)
          << i << " vs " << j;
    }
  }
}

TEST(Synthetic, TemplatesFillUnitSquare) {
  for (const auto& t : synthetic_templates(10, 3)) {
    double lo_x = 1, hi_x = 0, lo_y = 1, hi_y = 0;
    for (const auto& s : t) {
      for (const auto& p : s) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
      }
    }
    EXPECT_EQ(lo_x, 0.0);
    EXPECT_EQ(hi_x, 1.0);
    EXPECT_EQ(lo_y, 0.0);
    EXPECT_EQ(hi_y, 1.0);
  }
}

TEST(Synthetic, RejectsSingleClass) {
  EXPECT_THROW(generate_synthetic(1, 5, 0), DomainError);
}

TEST(HausdorffDistance, NeverExceedsPointSetOracle) {
  const auto t = synthetic_templates(6, 11);
  for (std::size_t i = 1; i < t.size(); ++i) {
    EXPECT_LE(hausdorff_distance(t[0], t[i]), point_set_hausdorff(t[0], t[i], 0.002) + 0.001);
  }
  EXPECT_NEAR(hausdorff_distance(t[0], t[0]), 0.0, 1e-12);
}

TEST(Perturb, ReverseOneStroke) {
  const auto c = test::make_character({{{0, 0}, {1, 0}, {1, 1}}});
  const auto r = perturb(c, {1.0, false, 0.0}, 5);
  EXPECT_EQ(r.strokes[0], (Stroke{{1, 1}, {1, 0}, {0, 0}}));
}

TEST(Perturb, PermuteTwoStrokesSwapsThem) {
  const auto c = test::make_character({{{0, 0}, {1, 0}}, {{2, 2}, {3, 3}}});
  const auto r = perturb(c, {0.0, true, 0.0}, 5);
  EXPECT_EQ(r.strokes[0], c.strokes[1]);
  EXPECT_EQ(r.strokes[1], c.strokes[0]);
}

TEST(Perturb, ZeroJitterPreservesPointMultiset) {
  const auto chars = generate_synthetic(5, 4, 3);
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const auto p = perturb(chars[i], {0.5, true, 0.0}, i);
    EXPECT_EQ(sorted_points(p), sorted_points(chars[i]));
  }
}

TEST(Perturb, ZeroJitterPreservesSpMap) {
  const auto cfg = SpatialGridConfig::from_step(0.0357);
  const auto chars = generate_synthetic(5, 4, 4);
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const auto p = preprocess(chars[i], {Spacing{0.0357}, 1});
    const auto q = perturb(p, {0.5, true, 0.0}, i);
    EXPECT_EQ(sp_map(character_matrix(p), cfg), sp_map(character_matrix(q), cfg));
  }
}

TEST(Perturb, JitterMovesPointsAndIsSeeded) {
  const auto c = test::make_character({{{0, 0}, {1, 0}, {1, 1}}});
  const auto a = perturb(c, {0.0, false, 0.01}, 9);
  EXPECT_NE(a, c);
  EXPECT_EQ(a, perturb(c, {0.0, false, 0.01}, 9));
}

TEST(Perturb, ValidatesSpec) {
  const auto c = test::make_character({{{0, 0}}});
  EXPECT_THROW(perturb(c, {1.5, false, 0.0}, 0), DomainError);
  EXPECT_THROW(perturb(c, {0.0, false, -1.0}, 0), DomainError);
}

std::vector<InkCharacter> labelled(const std::vector<int>& per_class) {
  std::vector<InkCharacter> out;
  double x = 0;
  for (std::size_t k = 0; k < per_class.size(); ++k) {
    for (int i = 0; i < per_class[k]; ++i) {
      auto c = test::make_character({{{x, x}}});
      x += 1;
      c.label = "L" + std::to_string(k);
      out.push_back(std::move(c));
    }
  }
  return out;
}

TEST(Split, TenSamplesEightyPercent) {
  const auto chars = labelled({10});
  const auto r = split(chars, {0.8, 1, false});
  EXPECT_EQ(r.train.size(), 8u);
  EXPECT_EQ(r.test.size(), 2u);
}

TEST(Split, StratifiedKeepsPerClassRatio) {
  const auto chars = labelled({10, 7, 3, 25});
  const auto r = split(chars, {0.8, 2, true});
  std::map<std::string, int> train;
  std::map<std::string, int> test;
  for (const auto& c : r.train) ++train[*c.label];
  for (const auto& c : r.test) ++test[*c.label];
  const std::vector<int> sizes{10, 7, 3, 25};
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const std::string l = "L" + std::to_string(k);
    EXPECT_NEAR(train[l], 0.8 * sizes[k], 1.0) << l;
    EXPECT_GE(test[l], 1) << l;
    EXPECT_EQ(train[l] + test[l], sizes[k]);
  }
}

TEST(Split, DisjointExhaustiveAndDeterministic) {
  const auto chars = labelled({6, 9, 4});
  const auto a = split(chars, {0.7, 3, true});
  const auto b = split(chars, {0.7, 3, true});
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::vector<InkPoint> all;
  for (const auto* side : {&a.train, &a.test}) {
    for (const auto& c : *side) all.push_back(c.strokes[0][0]);
  }
  std::sort(all.begin(), all.end(), [](auto& p, auto& q) { return p.x < q.x; });
  ASSERT_EQ(all.size(), chars.size());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i].x, static_cast<double>(i));
}

TEST(Split, SingletonClassGoesToTrainWithWarning) {
  const auto chars = labelled({5, 1});
  const auto r = split(chars, {0.8, 4, true});
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_TRUE(std::any_of(r.train.begin(), r.train.end(), [](auto& c) { return c.label == "L1"; }));
}

TEST(Split, RejectsBadFraction) {
  EXPECT_THROW(split(labelled({3}), {1.0, 0, true}), DomainError);
}

}  // namespace
}  // namespace hpod
