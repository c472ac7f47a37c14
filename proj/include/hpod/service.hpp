#pragma once

// Request handling for the prediction service, independent of the HTTP
// transport. The service holds the model read-only; every handler is const
// and keeps its working state on the stack.

#include <algorithm>
#include <exception>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "hpod/error.hpp"
#include "hpod/ink_io.hpp"
#include "hpod/pipeline.hpp"
#include "hpod/svm.hpp"

namespace hpod {

inline constexpr int kServiceSchemaVersion = 1;

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

class PredictionService {
 public:
  PredictionService(SvmModel model, PipelineConfig cfg)
      : model_(std::move(model)), cfg_(std::move(cfg)) {
    if (cfg_.kind != model_.kind) {
      throw UsageError("pipeline extracts " + std::string(to_string(cfg_.kind)) +
                       " features but the model expects " + std::string(to_string(model_.kind)));
    }
  }

  explicit PredictionService(const SvmModel& model)
      : PredictionService(model, default_pipeline(model.kind)) {}

  const SvmModel& model() const { return model_; }

  ServiceResponse health() const {
    return {200,
            {{"schema_version", kServiceSchemaVersion},
             {"status", "ok"},
             {"model_kind", std::string(to_string(model_.kind))},
             {"n_classes", model_.n_classes()}}};
  }

  ServiceResponse classes() const {
    auto list = nlohmann::json::array();
    for (int k = 1; k <= model_.n_classes(); ++k) {
      list.push_back({{"class_id", k}, {"label", model_.labels[static_cast<std::size_t>(k - 1)]}});
    }
    return {200, {{"schema_version", kServiceSchemaVersion}, {"classes", std::move(list)}}};
  }

  /// Body: {"strokes": [[[x, y], ...], ...], "top_k": k}. The first prediction
  /// is the elimination-walk winner; further entries follow by pairwise vote
  /// count.
  ServiceResponse predict(const std::string& body) const {
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
      return error(400, "request body is not valid JSON");
    }
    if (!req.is_object()) return error(400, "request body must be a JSON object");
    if (!req.contains("strokes")) return error(400, "missing field 'strokes'");

    InkCharacter c;
    try {
      c.strokes = strokes_from_json(req["strokes"], "strokes");
    } catch (const ParseError& e) {
      return error(400, e.what());
    }
    if (c.strokes.empty()) return error(400, "strokes must not be empty");
    try {
      validate(c);
    } catch (const StructuralError& e) {
      return error(400, e.what());
    }

    int top_k = 1;
    if (req.contains("top_k")) {
      if (!req["top_k"].is_number_integer() || req["top_k"].get<long long>() < 1) {
        return error(400, "top_k must be a positive integer");
      }
      top_k = static_cast<int>(std::min<long long>(req["top_k"].get<long long>(), model_.n_classes()));
    }

    try {
      const FeatureVector f = extract(c, cfg_);
      const int winner = ddag_predict(model_, f);
      auto preds = nlohmann::json::array();
      preds.push_back(entry(winner));
      if (top_k > 1) {
        for (const auto& v : rank_by_votes(model_, f)) {
          if (static_cast<int>(preds.size()) >= top_k) break;
          if (v.class_id != winner) preds.push_back(entry(v.class_id));
        }
      }
      return {200,
              {{"schema_version", kServiceSchemaVersion},
               {"predictions", std::move(preds)},
               {"feature_dim", f.dim()}}};
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Data) return error(422, e.what());
      return error(500, e.what());
    } catch (const std::exception& e) {
      return error(500, e.what());
    }
  }

 private:
  nlohmann::json entry(int class_id) const {
    return {{"label", model_.labels[static_cast<std::size_t>(class_id - 1)]},
            {"class_id", class_id}};
  }

  static ServiceResponse error(int status, const std::string& message) {
    return {status, {{"schema_version", kServiceSchemaVersion}, {"error", message}}};
  }

  SvmModel model_;
  PipelineConfig cfg_;
};

}  // namespace hpod
