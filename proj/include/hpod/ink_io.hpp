#pragma once

// Ink documents as JSON:
//   {"schema_version": 1,
//    "characters": [{"label": "a", "strokes": [[[x, y], ...], ...]}, ...],
//    "metadata": {"key": "value"}}
// Numbers are written in shortest round-trip form, so a save/load cycle
// reproduces every coordinate bit for bit.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpod/error.hpp"
#include "hpod/ink.hpp"

namespace hpod {

inline constexpr int kInkSchemaVersion = 1;

struct InkDocument {
  int schema_version = kInkSchemaVersion;
  std::vector<InkCharacter> characters;
  std::map<std::string, std::string> metadata;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("error while writing '" + path + "'");
}

/// "line L, column C" for a byte offset into `text`.
inline std::string text_position(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(source + ": malformed JSON at " + text_position(text, at));
  }
}

}  // namespace detail

/// Parses one JSON stroke list, [[[x, y], ...], ...]. `where` prefixes error
/// messages.
inline std::vector<Stroke> strokes_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": strokes must be an array");
  std::vector<Stroke> strokes;
  strokes.reserve(j.size());
  for (std::size_t s = 0; s < j.size(); ++s) {
    const auto& js = j[s];
    const std::string at_s = where + "[" + std::to_string(s) + "]";
    if (!js.is_array()) throw ParseError(at_s + ": stroke must be an array of points");
    Stroke stroke;
    stroke.reserve(js.size());
    for (std::size_t p = 0; p < js.size(); ++p) {
      const auto& jp = js[p];
      const std::string at_p = at_s + "[" + std::to_string(p) + "]";
      if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number() || !jp[1].is_number()) {
        throw ParseError(at_p + ": point must be [x, y]");
      }
      const InkPoint pt{jp[0].get<double>(), jp[1].get<double>()};
      if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) {
        throw ParseError(at_p + ": coordinates must be finite");
      }
      stroke.push_back(pt);
    }
    strokes.push_back(std::move(stroke));
  }
  return strokes;
}

inline nlohmann::json strokes_to_json(const std::vector<Stroke>& strokes) {
  auto out = nlohmann::json::array();
  for (const auto& s : strokes) {
    auto js = nlohmann::json::array();
    for (const auto& p : s) js.push_back({p.x, p.y});
    out.push_back(std::move(js));
  }
  return out;
}

inline nlohmann::json to_json(const InkDocument& doc) {
  nlohmann::json j;
  j["schema_version"] = doc.schema_version;
  j["characters"] = nlohmann::json::array();
  for (const auto& c : doc.characters) {
    nlohmann::json jc;
    if (c.label) jc["label"] = *c.label;
    jc["strokes"] = strokes_to_json(c.strokes);
    j["characters"].push_back(std::move(jc));
  }
  j["metadata"] = doc.metadata;
  return j;
}

inline InkDocument ink_document_from_json(const nlohmann::json& j, const std::string& source) {
  if (!j.is_object()) throw ParseError(source + ": document must be a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw ParseError(source + ": missing integer schema_version");
  }
  InkDocument doc;
  doc.schema_version = j["schema_version"].get<int>();
  if (doc.schema_version != kInkSchemaVersion) {
    throw VersionError(source + ": unsupported ink schema_version " +
                       std::to_string(doc.schema_version) + " (supported: 1)");
  }
  if (!j.contains("characters") || !j["characters"].is_array()) {
    throw ParseError(source + ": missing characters array");
  }
  const auto& chars = j["characters"];
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const auto& jc = chars[i];
    const std::string where = source + ": characters[" + std::to_string(i) + "]";
    if (!jc.is_object()) throw ParseError(where + ": character must be an object");
    InkCharacter c;
    if (jc.contains("label") && !jc["label"].is_null()) {
      if (!jc["label"].is_string()) throw ParseError(where + ".label: must be a string");
      c.label = jc["label"].get<std::string>();
    }
    if (!jc.contains("strokes")) throw ParseError(where + ": missing strokes");
    c.strokes = strokes_from_json(jc["strokes"], where + ".strokes");
    doc.characters.push_back(std::move(c));
  }
  if (j.contains("metadata")) {
    const auto& jm = j["metadata"];
    if (!jm.is_object()) throw ParseError(source + ": metadata must be an object");
    for (const auto& [k, v] : jm.items()) {
      if (!v.is_string()) throw ParseError(source + ": metadata." + k + " must be a string");
      doc.metadata[k] = v.get<std::string>();
    }
  }
  return doc;
}

inline InkDocument parse_ink_document(const std::string& text, const std::string& source = "ink") {
  return ink_document_from_json(detail::parse_json_text(text, source), source);
}

inline std::string serialize_ink_document(const InkDocument& doc) {
  return to_json(doc).dump(1) + "\n";
}

inline InkDocument load_ink_document(const std::string& path) {
  return parse_ink_document(detail::read_file(path), path);
}

inline std::vector<InkCharacter> load_ink(const std::string& path) {
  return load_ink_document(path).characters;
}

inline void save_ink(const std::vector<InkCharacter>& chars, const std::string& path,
                     const std::map<std::string, std::string>& metadata = {}) {
  InkDocument doc;
  doc.characters = chars;
  doc.metadata = metadata;
  detail::write_file(path, serialize_ink_document(doc));
}

}  // namespace hpod
