#pragma once

// Keyword canonicalization, alias consolidation and expert code maps.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "coword/corpus.hpp"
#include "coword/csv.hpp"
#include "coword/error.hpp"
#include "coword/util.hpp"

namespace coword {

struct NormalizationRules {
  bool fold_case = true;
  bool collapse_whitespace = true;
  bool strip_terminal_punctuation = true;
};

inline bool is_terminal_punctuation(char ch) {
  return ch == '.' || ch == ',' || ch == ';' || ch == ':' || ch == '!' || ch == '?';
}

// Mechanical cleanup only; semantic merges belong in an AliasMap.
inline std::string canonicalize(std::string_view raw, const NormalizationRules& rules = {}) {
  std::string out;
  out.reserve(raw.size());
  const auto body = trim(raw);
  bool pending_space = false;
  for (char ch : body) {
    if (rules.collapse_whitespace && is_space(ch)) {
      pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    // Bytes >= 0x80 belong to multi-byte UTF-8 sequences and are left alone.
    const auto uch = static_cast<unsigned char>(ch);
    out.push_back(rules.fold_case && uch < 0x80 ? static_cast<char>(std::tolower(uch)) : ch);
  }
  if (rules.strip_terminal_punctuation) {
    while (!out.empty() && (is_terminal_punctuation(out.back()) || is_space(out.back()))) out.pop_back();
  }
  if (out.empty()) throw Error("empty keyword after normalization: '" + std::string(raw) + "'");
  return out;
}

namespace detail {

inline std::vector<std::string> dedupe(std::vector<std::string> keywords) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& k : keywords)
    if (seen.insert(k).second) out.push_back(std::move(k));
  return out;
}

inline Corpus rebuild(const Corpus& c, std::vector<Paper> papers, KeywordKind kind) {
  return Corpus(std::move(papers), c.provenance(), kind);
}

}  // namespace detail

// Canonicalizes every keyword of every paper, dropping keywords that reduce to
// nothing and collapsing per-paper duplicates.
inline Corpus canonicalize_corpus(const Corpus& c, const NormalizationRules& rules = {}) {
  std::vector<Paper> papers = c.papers();
  for (auto& p : papers) {
    std::vector<std::string> cleaned;
    for (const auto& k : p.keywords) {
      if (trim(k).empty()) continue;
      try {
        cleaned.push_back(canonicalize(k, rules));
      } catch (const Error&) {
        // punctuation-only keyword
      }
    }
    p.keywords = detail::dedupe(std::move(cleaned));
  }
  return detail::rebuild(c, std::move(papers), c.keyword_kind());
}

class AliasMap {
 public:
  static constexpr int kMaxHops = 2;

  AliasMap() = default;

  // Validates that the map is acyclic and every key resolves within two hops.
  explicit AliasMap(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {
    for (const auto& [key, target] : entries_) {
      std::vector<std::string> path{key};
      std::string cur = key;
      while (true) {
        auto it = entries_.find(cur);
        if (it == entries_.end() || it->second == cur) break;
        if (std::find(path.begin(), path.end(), it->second) != path.end()) {
          path.push_back(it->second);
          throw Error("alias map contains a cycle: " + join(path, " -> "));
        }
        path.push_back(it->second);
        cur = it->second;
      }
      if (path.size() - 1 > static_cast<std::size_t>(kMaxHops)) {
        throw Error("alias chain longer than 2 hops: " + join(path, " -> "));
      }
    }
  }

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  std::string resolve(const std::string& keyword) const {
    std::string cur = keyword;
    for (int hop = 0; hop <= kMaxHops; ++hop) {
      auto it = entries_.find(cur);
      if (it == entries_.end() || it->second == cur) return cur;
      cur = it->second;
    }
    return cur;
  }

 private:
  std::map<std::string, std::string> entries_;
};

// CSV `raw,canonical` with an optional header row. Both sides are
// canonicalized with `rules`.
inline AliasMap parse_alias_map(std::string_view text, const NormalizationRules& rules = {}) {
  std::map<std::string, std::string> entries;
  for (const auto& rec : csv::read(text)) {
    if (rec.fields.size() != 2) throw ParseError("alias rows need exactly 2 fields", rec.line);
    if (rec.line == 1 && trim(rec.fields[0]) == "raw" && trim(rec.fields[1]) == "canonical") continue;
    std::string raw, target;
    try {
      raw = canonicalize(rec.fields[0], rules);
      target = canonicalize(rec.fields[1], rules);
    } catch (const Error& e) {
      throw ParseError(e.what(), rec.line);
    }
    auto [it, inserted] = entries.emplace(raw, target);
    if (!inserted && it->second != target) {
      throw ParseError("conflicting alias for '" + raw + "': '" + it->second + "' vs '" + target + "'", rec.line);
    }
  }
  return AliasMap(std::move(entries));
}

inline Corpus apply_alias_map(const Corpus& c, const AliasMap& m) {
  std::vector<Paper> papers = c.papers();
  for (auto& p : papers) {
    for (auto& k : p.keywords) k = m.resolve(k);
    p.keywords = detail::dedupe(std::move(p.keywords));
  }
  return detail::rebuild(c, std::move(papers), c.keyword_kind());
}

struct CodeMap {
  std::string coder_id;
  std::map<std::string, std::set<std::string>> entries;

  const std::set<std::string>* codes_for(const std::string& keyword) const {
    auto it = entries.find(keyword);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// CSV `keyword,code1|code2|...,coder_id`, optional header. Returns one map per
// coder in order of first appearance.
inline std::vector<CodeMap> parse_code_maps(std::string_view text, const NormalizationRules& rules = {}) {
  std::vector<CodeMap> maps;
  for (const auto& rec : csv::read(text)) {
    if (rec.fields.size() != 3) throw ParseError("code map rows need exactly 3 fields", rec.line);
    if (rec.line == 1 && trim(rec.fields[0]) == "keyword") continue;
    std::string keyword;
    try {
      keyword = canonicalize(rec.fields[0], rules);
    } catch (const Error& e) {
      throw ParseError(e.what(), rec.line);
    }
    std::set<std::string> codes;
    for (const auto& code : split(rec.fields[1], '|')) {
      auto t = trim(code);
      if (!t.empty()) codes.emplace(t);
    }
    if (codes.empty()) throw ParseError("keyword '" + keyword + "' has no codes", rec.line);
    const std::string coder{trim(rec.fields[2])};
    if (coder.empty()) throw ParseError("empty coder id", rec.line);
    auto it = std::find_if(maps.begin(), maps.end(), [&](const CodeMap& m) { return m.coder_id == coder; });
    if (it == maps.end()) {
      maps.push_back(CodeMap{coder, {}});
      it = std::prev(maps.end());
    }
    it->entries[keyword].insert(codes.begin(), codes.end());
  }
  return maps;
}

enum class CodeMapMode { strict, lenient };

struct CodeMapResult {
  Corpus corpus;
  std::map<std::string, std::size_t> unmapped;  // keyword -> papers it was dropped from
};

// Replaces each paper's keywords by the union of their codes.
inline CodeMapResult apply_code_map(const Corpus& c, const CodeMap& m, CodeMapMode mode) {
  CodeMapResult result;
  std::vector<Paper> papers = c.papers();
  for (auto& p : papers) {
    std::vector<std::string> coded;
    for (const auto& k : p.keywords) {
      const auto* codes = m.codes_for(k);
      if (!codes) {
        if (mode == CodeMapMode::strict) throw Error("keyword '" + k + "' is not covered by code map '" + m.coder_id + "'");
        ++result.unmapped[k];
        continue;
      }
      coded.insert(coded.end(), codes->begin(), codes->end());
    }
    p.keywords = detail::dedupe(std::move(coded));
  }
  result.corpus = detail::rebuild(c, std::move(papers), KeywordKind::expert);
  return result;
}

}  // namespace coword
