#include <gtest/gtest.h>

#include <future>
#include <vector>

#include "hpod/ink_io.hpp"
#include "hpod/service.hpp"
#include "hpod/synthetic.hpp"

namespace hpod {
namespace {

struct Trained {
  std::vector<InkCharacter> chars;
  SvmModel model;
};

const Trained& trained() {
  static const Trained t = [] {
    Trained r;
    r.chars = generate_synthetic(5, 6, 31);
    std::vector<FeatureVector> x;
    std::vector<std::string> y;
    const auto cfg = default_pipeline(FeatureKind::HPOD);
    for (const auto& c : r.chars) {
      x.push_back(extract(c, cfg));
      y.push_back(*c.label);
    }
    r.model = train_multiclass(x, y, cfg.kernel);
    return r;
  }();
  return t;
}

std::string body_for(const InkCharacter& c, int top_k) {
  return nlohmann::json{{"strokes", strokes_to_json(c.strokes)}, {"top_k", top_k}}.dump();
}

TEST(Service, Health) {
  const PredictionService s(trained().model);
  const auto r = s.health();
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["status"], "ok");
  EXPECT_EQ(r.body["model_kind"], "hpod");
  EXPECT_EQ(r.body["n_classes"], 5);
  EXPECT_EQ(r.body["schema_version"], kServiceSchemaVersion);
}

TEST(Service, Classes) {
  const PredictionService s(trained().model);
  const auto r = s.classes();
  ASSERT_EQ(r.body["classes"].size(), 5u);
  EXPECT_EQ(r.body["classes"][0]["class_id"], 1);
  EXPECT_EQ(r.body["classes"][0]["label"], "c000");
  EXPECT_EQ(r.body["classes"][4]["label"], "c004");
}

TEST(Service, TrainingGlyphsPredictOwnLabel) {
  const PredictionService s(trained().model);
  for (const auto& c : trained().chars) {
    const auto r = s.predict(body_for(c, 1));
    ASSERT_EQ(r.status, 200) << r.body.dump();
    ASSERT_EQ(r.body["predictions"].size(), 1u);
    EXPECT_EQ(r.body["predictions"][0]["label"], *c.label);
    EXPECT_EQ(r.body["feature_dim"], 722);
  }
}

TEST(Service, TopKListsDistinctClassesWinnerFirst) {
  const PredictionService s(trained().model);
  const auto& c = trained().chars[7];
  const auto top1 = s.predict(body_for(c, 1));
  const auto r = s.predict(body_for(c, 3));
  ASSERT_EQ(r.body["predictions"].size(), 3u);
  EXPECT_EQ(r.body["predictions"][0], top1.body["predictions"][0]);
  EXPECT_NE(r.body["predictions"][0]["class_id"], r.body["predictions"][1]["class_id"]);
  EXPECT_NE(r.body["predictions"][1]["class_id"], r.body["predictions"][2]["class_id"]);
  EXPECT_EQ(s.predict(body_for(c, 99)).body["predictions"].size(), 5u);
}

TEST(Service, MalformedRequestsAre400) {
  const PredictionService s(trained().model);
  for (const char* body : {"{", "[]", R"({"top_k": 1})", R"({"strokes": []})",
                           R"({"strokes": [[[0, "a"]]]})", R"({"strokes": [[]]})",
                           R"({"strokes": [[[0, 0], [1, 1]]], "top_k": 0})",
                           R"({"strokes": [[[0, 0], [1, 1]]], "top_k": 1.5})"}) {
    const auto r = s.predict(body);
    EXPECT_EQ(r.status, 400) << body;
    EXPECT_TRUE(r.body.contains("error")) << body;
    EXPECT_EQ(r.body["schema_version"], kServiceSchemaVersion);
  }
}

TEST(Service, GeometryMismatchIs422) {
  // A pipeline whose grid cannot hold the configured cells.
  auto cfg = default_pipeline(FeatureKind::HPOD);
  cfg.hpod.point_cells.n_cells = 20;
  const PredictionService s(trained().model, cfg);
  const auto r = s.predict(body_for(trained().chars[0], 1));
  EXPECT_EQ(r.status, 422) << r.body.dump();
}

TEST(Service, RejectsPipelineOfOtherKind) {
  EXPECT_THROW(PredictionService(trained().model, default_pipeline(FeatureKind::SP)), UsageError);
}

TEST(Service, ConcurrentRequestsAgree) {
  const PredictionService s(trained().model);
  const std::string body = body_for(trained().chars[3], 3);
  const auto expected = s.predict(body).body;
  std::vector<std::future<nlohmann::json>> futures;
  for (int i = 0; i < 8; ++i) {
    futures.push_back(std::async(std::launch::async, [&] { return s.predict(body).body; }));
  }
  for (auto& f : futures) EXPECT_EQ(f.get(), expected);
}

}  // namespace
}  // namespace hpod
