#pragma once

// Preprocessing plus feature extraction for one feature kind, with defaults
// matching the tuned parameters of each representation.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpod/error.hpp"
#include "hpod/feature_vector.hpp"
#include "hpod/ink.hpp"
#include "hpod/ink_io.hpp"
#include "hpod/preprocess.hpp"
#include "hpod/spatial_features.hpp"
#include "hpod/spatial_map.hpp"
#include "hpod/svm.hpp"
#include "hpod/temporal_features.hpp"

namespace hpod {

inline constexpr double kSpStep = 0.0357;
inline constexpr double kHogStep = 0.0278;
inline constexpr double kHpodStep = 0.0278;

struct PipelineConfig {
  FeatureKind kind = FeatureKind::HPOD;
  PreprocessConfig preprocess;
  SpatialGridConfig sp_grid = SpatialGridConfig::from_step(kSpStep);
  HogConfig hog;
  HpodConfig hpod;
  int dwt_levels = kDefaultDwtLevels;
  KernelConfig kernel;
};

/// Temporal kinds resample to 128 points in total; spatial kinds resample at
/// their grid step.
inline PipelineConfig default_pipeline(FeatureKind kind) {
  PipelineConfig cfg;
  cfg.kind = kind;
  cfg.kernel = default_kernel(kind);
  switch (kind) {
    case FeatureKind::SP:
      cfg.preprocess.resample = Spacing{kSpStep};
      break;
    case FeatureKind::HOG:
      cfg.preprocess.resample = Spacing{kHogStep};
      break;
    case FeatureKind::HPOD:
      cfg.preprocess.resample = Spacing{kHpodStep};
      break;
    default:
      cfg.preprocess.resample = TotalPoints{kTemporalPoints};
      break;
  }
  return cfg;
}

/// Features of a character that has already been preprocessed.
inline FeatureVector extract_preprocessed(const InkCharacter& p, const PipelineConfig& cfg) {
  const Spans spans = span_features(p);
  FeatureVector f;
  switch (cfg.kind) {
    case FeatureKind::ST: f = st_features(character_matrix(p), spans); break;
    case FeatureKind::DFT: f = dft_features(character_matrix(p), spans); break;
    case FeatureKind::DCT: f = dct_features(character_matrix(p), spans); break;
    case FeatureKind::DWT: f = dwt_features(character_matrix(p), spans, cfg.dwt_levels); break;
    case FeatureKind::SP: f = sp_features(character_matrix(p), cfg.sp_grid, spans); break;
    case FeatureKind::HOG: f = hog_features(character_matrix(p), cfg.hog, spans); break;
    case FeatureKind::HPOD: f = hpod_features(p, cfg.hpod, spans); break;
  }
  check_dim(f);
  return f;
}

inline FeatureVector extract(const InkCharacter& c, const PipelineConfig& cfg) {
  return extract_preprocessed(preprocess(c, cfg.preprocess), cfg);
}

inline FeatureVector extract(const InkCharacter& c, FeatureKind kind) {
  return extract(c, default_pipeline(kind));
}

namespace detail {

template <typename T>
void override_field(const nlohmann::json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("config: field '") + key + "' has the wrong type");
  }
}

inline void override_cells(const nlohmann::json& j, const char* key, CellGrid& g) {
  if (!j.contains(key)) return;
  const auto& jc = j.at(key);
  override_field(jc, "n_cells", g.n_cells);
  override_field(jc, "cell_size", g.cell_size);
  override_field(jc, "overlap", g.overlap);
}

}  // namespace detail

/// Applies a JSON override object on top of the defaults for its kind:
///   {"feature": "hpod", "smoothing_passes": 1, "spacing": 0.0278,
///    "total_points": 128, "grid_step": 0.0278, "n_o": 1, "n_d": 3,
///    "orientation_step": 20, "dynamics_step": 20, "dwt_levels": 7,
///    "point_cells": {"n_cells": 6, "cell_size": 6, "overlap": 3}, ...,
///    "kernel": {"width": 10, "penalty": 1024}}
/// Keys that do not apply to the kind are ignored. `kind` wins over "feature"
/// when both are given.
inline PipelineConfig pipeline_from_json(const nlohmann::json& j,
                                         std::optional<FeatureKind> kind = std::nullopt) {
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  if (!kind) {
    if (!j.contains("feature") || !j["feature"].is_string()) {
      throw UsageError("config: no feature kind given");
    }
    kind = parse_feature_kind(j["feature"].get<std::string>());
  }
  PipelineConfig cfg = default_pipeline(*kind);
  detail::override_field(j, "smoothing_passes", cfg.preprocess.smoothing_passes);
  if (auto* tp = std::get_if<TotalPoints>(&cfg.preprocess.resample)) {
    detail::override_field(j, "total_points", tp->count);
  } else {
    detail::override_field(j, "spacing", std::get<Spacing>(cfg.preprocess.resample).delta);
  }
  detail::override_field(j, "dwt_levels", cfg.dwt_levels);
  if (j.contains("grid_step")) {
    double step = 0.0;
    detail::override_field(j, "grid_step", step);
    if (!(step > 0.0)) throw DomainError("config: grid_step must be positive");
    cfg.sp_grid = SpatialGridConfig::from_step(step);
    cfg.hog.grid = SpatialGridConfig::from_step(step);
    cfg.hpod.grid = SpatialGridConfig::from_step(step);
  }
  detail::override_field(j, "orientation_step", cfg.hog.orientation_step);
  detail::override_field(j, "n_cells", cfg.hog.n_cells);
  detail::override_field(j, "block_size", cfg.hog.block_size);
  detail::override_field(j, "block_overlap", cfg.hog.block_overlap);
  detail::override_field(j, "n_o", cfg.hpod.n_o);
  detail::override_field(j, "n_d", cfg.hpod.n_d);
  detail::override_field(j, "orientation_step", cfg.hpod.orientation_step);
  detail::override_field(j, "dynamics_step", cfg.hpod.dynamics_step);
  detail::override_cells(j, "point_cells", cfg.hpod.point_cells);
  detail::override_cells(j, "orientation_cells", cfg.hpod.orientation_cells);
  detail::override_cells(j, "dynamics_cells", cfg.hpod.dynamics_cells);
  if (j.contains("kernel")) {
    detail::override_field(j.at("kernel"), "width", cfg.kernel.width);
    detail::override_field(j.at("kernel"), "penalty", cfg.kernel.penalty);
  }
  return cfg;
}

inline PipelineConfig load_pipeline_config(const std::string& path,
                                           std::optional<FeatureKind> kind = std::nullopt) {
  return pipeline_from_json(detail::parse_json_text(detail::read_file(path), path), kind);
}

// ---------------------------------------------------------------------------
// Feature files: {"schema_version": 1, "kind": "hpod", "dim": 722,
//                 "rows": [{"label": "a", "values": [...]}, ...]}

inline constexpr int kFeatureSchemaVersion = 1;

struct FeatureTable {
  FeatureKind kind = FeatureKind::HPOD;
  std::vector<FeatureVector> rows;
  std::vector<std::string> labels;  // empty string for unlabelled rows
};

inline std::string serialize_feature_table(const FeatureTable& t) {
  nlohmann::json j;
  j["schema_version"] = kFeatureSchemaVersion;
  j["kind"] = std::string(to_string(t.kind));
  j["dim"] = expected_dim(t.kind);
  j["rows"] = nlohmann::json::array();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    j["rows"].push_back({{"label", t.labels[i]}, {"values", t.rows[i].values}});
  }
  return j.dump() + "\n";
}

inline FeatureTable parse_feature_table(const std::string& text, const std::string& source) {
  const auto j = detail::parse_json_text(text, source);
  if (!j.is_object() || !j.contains("schema_version") || !j.contains("kind") ||
      !j.contains("rows") || !j["rows"].is_array() || !j["kind"].is_string() ||
      !j["schema_version"].is_number_integer()) {
    throw ParseError(source + ": not a feature file");
  }
  if (j["schema_version"].get<int>() != kFeatureSchemaVersion) {
    throw VersionError(source + ": unsupported feature schema_version");
  }
  FeatureTable t;
  t.kind = parse_feature_kind(j["kind"].get<std::string>());
  const auto& rows = j["rows"];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = source + ": rows[" + std::to_string(i) + "]";
    const auto& r = rows[i];
    if (!r.is_object() || !r.contains("values") || !r["values"].is_array()) {
      throw ParseError(where + ": expected {label, values}");
    }
    FeatureVector f{t.kind, {}};
    try {
      f.values = r["values"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError(where + ": values must be numbers");
    }
    if (f.dim() != expected_dim(t.kind)) {
      throw DimensionError(where + ": dimension " + std::to_string(f.dim()) + ", expected " +
                           std::to_string(expected_dim(t.kind)));
    }
    t.rows.push_back(std::move(f));
    t.labels.push_back(r.contains("label") && r["label"].is_string() ? r["label"].get<std::string>()
                                                                     : std::string());
  }
  return t;
}

inline void save_feature_table(const FeatureTable& t, const std::string& path) {
  detail::write_file(path, serialize_feature_table(t));
}

inline FeatureTable load_feature_table(const std::string& path) {
  return parse_feature_table(detail::read_file(path), path);
}

}  // namespace hpod
