#pragma once

// The bundled fixture corpus run through the same steps as `coword analyze`.

#include <string>

#include "coword/report.hpp"

namespace fixture {

inline std::string data(const std::string& name) { return std::string(COWORD_TEST_DATA) + "/" + name; }

inline coword::AnalysisConfig config() {
  return coword::config_from_json(nlohmann::json::parse(coword::read_file(data("fixture_config.json"))));
}

inline coword::Corpus corpus() {
  auto c = coword::canonicalize_corpus(coword::read_corpus_file(data("fixture_corpus.csv")));
  return coword::apply_alias_map(c, coword::parse_alias_map(coword::read_file(data("sample_aliases.csv"))));
}

inline coword::AnalysisSnapshot snapshot() { return coword::run_pipeline(corpus(), config()); }

}  // namespace fixture
