#pragma once

// Structural checks for API payloads. A schema is JSON:
//   "string" | "integer" | "number" | "boolean" | "null" | "a|b"  scalar types
//   [schema]                                                       array of schema
//   {"key": schema, ...}                                           object with required keys
// Objects may carry extra keys; "?key" marks an optional key.

#include <string>
#include <vector>

#include <json.hpp>

namespace schema {

inline bool scalar_matches(const nlohmann::json& v, const std::string& type) {
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "any") return true;
  return false;
}

inline void check(const nlohmann::json& v, const nlohmann::json& s, const std::string& path,
                  std::vector<std::string>& errors) {
  if (s.is_string()) {
    const auto spec = s.get<std::string>();
    std::size_t start = 0;
    bool ok = false;
    while (start <= spec.size()) {
      auto bar = spec.find('|', start);
      if (bar == std::string::npos) bar = spec.size();
      ok = ok || scalar_matches(v, spec.substr(start, bar - start));
      start = bar + 1;
    }
    if (!ok) errors.push_back(path + ": expected " + spec + ", got " + v.type_name());
  } else if (s.is_array()) {
    if (!v.is_array()) {
      errors.push_back(path + ": expected array, got " + v.type_name());
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s[0], path + "[" + std::to_string(i) + "]", errors);
  } else if (s.is_object()) {
    if (!v.is_object()) {
      errors.push_back(path + ": expected object, got " + v.type_name());
      return;
    }
    for (const auto& [key, sub] : s.items()) {
      const bool optional = !key.empty() && key[0] == '?';
      const auto name = optional ? key.substr(1) : key;
      if (!v.contains(name)) {
        if (!optional) errors.push_back(path + ": missing '" + name + "'");
        continue;
      }
      check(v.at(name), sub, path + "." + name, errors);
    }
  }
}

inline std::vector<std::string> validate(const nlohmann::json& v, const nlohmann::json& s) {
  std::vector<std::string> errors;
  check(v, s, "$", errors);
  return errors;
}

inline const nlohmann::json& api() {
  static const nlohmann::json schemas = nlohmann::json::parse(R"({
    "error": {"error": {"code": "string", "message": "string"}},
    "trend": {"keyword": "string", "total": "integer", "slope": "number", "stderr": "number",
              "p": "number", "significant": "boolean", "years": ["integer"]},
    "meta": {"snapshot_id": "string",
             "digest": {"papers": "integer", "papers_with_keywords": "integer",
                        "unique_keywords": "integer", "occurrences": "integer"},
             "config": {"version": "integer", "min_occurrence": "integer", "excluded": ["string"],
                        "clusters": "integer", "linkage": "string", "metric": "string",
                        "venues": ["string"], "years": "null|any", "trend_top": "integer",
                        "trend_mode": "string", "graph_threshold": "number"},
             "years": ["integer"], "keyword_kind": "string", "analyzed_keywords": "integer",
             "clusters": "integer", "powerlaw": "null|any", "warnings": ["string"]},
    "search": {"query": "string", "total": "integer", "offset": "integer", "limit": "integer",
               "results": [{"keyword": "string", "count": "integer", "rank": "integer",
                            "cluster": "integer|null"}]},
    "keyword": {"keyword": "string", "count": "integer", "rank": "integer", "cluster": "integer|null",
                "cooccurring": [{"keyword": "string", "count": "integer", "correlation": "number|null"}],
                "papers": [{"id": "string", "title": "string", "venue": "string", "year": "integer"}],
                "trend": "null|any"},
    "cooccurring": {"keyword": "string", "total": "integer", "offset": "integer", "limit": "integer",
                    "results": [{"keyword": "string", "count": "integer", "correlation": "number|null"}]},
    "trend_detail": {"keyword": "string", "series": [{"year": "integer", "count": "number"}],
                     "fit": "null|any"},
    "papers": {"keyword": "string|null", "total": "integer", "offset": "integer", "limit": "integer",
               "results": [{"id": "string", "title": "string", "venue": "string", "year": "integer",
                            "keywords": ["string"]}]},
    "cluster_summary": {"id": "integer", "cluster": "integer", "n": "integer", "median_freq": "number",
                        "cw_freq": "number", "density": "number", "centrality": "number",
                        "internal_edges": "integer", "boundary_edges": "integer",
                        "top_keywords": ["string"], "quadrant": "string",
                        "margin": {"centrality": "number", "density": "number"}},
    "strategic": {"median_centrality": "number", "median_density": "number",
                  "points": [{"cluster": "integer", "centrality": "number", "density": "number",
                              "quadrant": "string", "theme": "string", "label": ["string"],
                              "margin": {"centrality": "number", "density": "number"}}]}
  })");
  return schemas;
}

}  // namespace schema
