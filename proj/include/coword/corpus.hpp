#pragma once

// Paper records, corpus ingestion and keyword frequency tables.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "coword/csv.hpp"
#include "coword/error.hpp"
#include "coword/util.hpp"

namespace coword {

inline constexpr int kMinYear = 1980;
inline constexpr int kMaxYear = 2100;

enum class KeywordKind { author, expert, taxonomy };

inline std::string to_string(KeywordKind kind) {
  switch (kind) {
    case KeywordKind::author: return "author";
    case KeywordKind::expert: return "expert";
    case KeywordKind::taxonomy: return "taxonomy";
  }
  return "author";
}

inline KeywordKind keyword_kind_from_string(std::string_view s) {
  if (s == "author") return KeywordKind::author;
  if (s == "expert") return KeywordKind::expert;
  if (s == "taxonomy") return KeywordKind::taxonomy;
  throw Error("unknown keyword kind '" + std::string(s) + "'");
}

struct Paper {
  std::string id;
  std::string title;
  std::string venue;
  int year = 0;
  std::vector<std::string> keywords;

  // Papers without keywords stay in the corpus but never reach a matrix.
  bool flagged() const noexcept { return keywords.empty(); }

  bool has_keyword(std::string_view keyword) const {
    return std::find(keywords.begin(), keywords.end(), keyword) != keywords.end();
  }

  friend bool operator==(const Paper&, const Paper&) = default;
};

struct YearRange {
  int first = kMinYear;
  int last = kMaxYear;

  bool contains(int year) const noexcept { return year >= first && year <= last; }
  bool empty() const noexcept { return last < first; }
  std::size_t size() const noexcept { return empty() ? 0 : static_cast<std::size_t>(last - first + 1); }

  friend bool operator==(const YearRange&, const YearRange&) = default;
};

// "2004-2013" or "2008".
inline YearRange parse_year_range(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    s = trim(s);
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error("invalid year range '" + std::string(text) + "'");
    return value;
  };
  const auto dash = text.find_first_of("-:");
  if (dash == std::string_view::npos) {
    const int y = parse_int(text);
    return {y, y};
  }
  YearRange r{parse_int(text.substr(0, dash)), parse_int(text.substr(dash + 1))};
  if (r.empty()) throw Error("invalid year range '" + std::string(text) + "'");
  return r;
}

// Immutable, validated collection of papers.
class Corpus {
 public:
  Corpus() = default;

  Corpus(std::vector<Paper> papers, std::string provenance = {}, KeywordKind kind = KeywordKind::author)
      : papers_(std::move(papers)), provenance_(std::move(provenance)), kind_(kind) {
    std::unordered_map<std::string_view, std::size_t> seen;
    for (std::size_t i = 0; i < papers_.size(); ++i) {
      const Paper& p = papers_[i];
      if (p.id.empty()) throw Error("paper #" + std::to_string(i + 1) + " has an empty id");
      auto [it, inserted] = seen.emplace(p.id, i);
      if (!inserted) {
        throw Error("duplicate paper id '" + p.id + "' at records " + std::to_string(it->second + 1) + " and " +
                    std::to_string(i + 1));
      }
      if (p.year < kMinYear || p.year > kMaxYear) {
        throw Error("paper '" + p.id + "' has year " + std::to_string(p.year) + " outside [1980, 2100]");
      }
    }
  }

  const std::vector<Paper>& papers() const noexcept { return papers_; }
  const std::string& provenance() const noexcept { return provenance_; }
  KeywordKind keyword_kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return papers_.size(); }
  bool empty() const noexcept { return papers_.empty(); }

  const Paper* find(std::string_view id) const {
    for (const auto& p : papers_)
      if (p.id == id) return &p;
    return nullptr;
  }

  std::size_t flagged_count() const {
    return static_cast<std::size_t>(std::count_if(papers_.begin(), papers_.end(), [](const Paper& p) { return p.flagged(); }));
  }

  std::set<std::string> venues() const {
    std::set<std::string> out;
    for (const auto& p : papers_) out.insert(p.venue);
    return out;
  }

  // Smallest range covering every paper year; nullopt for an empty corpus.
  std::optional<YearRange> year_span() const {
    if (papers_.empty()) return std::nullopt;
    auto [lo, hi] = std::minmax_element(papers_.begin(), papers_.end(),
                                        [](const Paper& a, const Paper& b) { return a.year < b.year; });
    return YearRange{lo->year, hi->year};
  }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.papers_ == b.papers_ && a.kind_ == b.kind_;
  }

 private:
  std::vector<Paper> papers_;
  std::string provenance_;
  KeywordKind kind_ = KeywordKind::author;
};

enum class CorpusFormat { delimited, records };

inline CorpusFormat corpus_format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return CorpusFormat::records;
  return CorpusFormat::delimited;
}

namespace detail {

inline std::vector<std::string> clean_keywords(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& k : raw) {
    auto t = trim(k);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline int parse_year(std::string_view s, std::size_t line) {
  s = trim(s);
  int year = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), year);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("invalid year '" + std::string(s) + "'", line);
  if (year < kMinYear || year > kMaxYear) throw ParseError("year " + std::to_string(year) + " outside [1980, 2100]", line);
  return year;
}

inline void check_unique(std::vector<Paper>& papers, const std::vector<std::size_t>& lines) {
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    auto [it, inserted] = seen.emplace(papers[i].id, i);
    if (!inserted) {
      throw ParseError("duplicate paper id '" + papers[i].id + "' (first defined on line " +
                           std::to_string(lines[it->second]) + ")",
                       lines[i]);
    }
  }
}

inline std::vector<Paper> parse_delimited(std::string_view text) {
  const auto records = csv::read(text);
  if (records.empty()) throw ParseError("missing header row", 1);
  const std::vector<std::string> expected{"id", "title", "venue", "year", "keywords"};
  std::vector<std::string> header;
  for (const auto& f : records.front().fields) header.emplace_back(trim(f));
  if (header != expected) throw ParseError("header must be id,title,venue,year,keywords", records.front().line);

  std::vector<Paper> papers;
  std::vector<std::size_t> lines;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 5) {
      throw ParseError("expected 5 fields, found " + std::to_string(rec.fields.size()), rec.line);
    }
    Paper p;
    p.id = std::string(trim(rec.fields[0]));
    if (p.id.empty()) throw ParseError("empty paper id", rec.line);
    p.title = rec.fields[1];
    p.venue = std::string(trim(rec.fields[2]));
    p.year = parse_year(rec.fields[3], rec.line);
    p.keywords = clean_keywords(split(rec.fields[4], ';'));
    papers.push_back(std::move(p));
    lines.push_back(rec.line);
  }
  check_unique(papers, lines);
  return papers;
}

inline std::vector<Paper> parse_records(std::string_view text) {
  std::vector<Paper> papers;
  std::vector<std::size_t> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("record must be a JSON object", line_no);
    for (const char* key : {"id", "title", "venue", "year", "keywords"}) {
      if (!obj.contains(key)) throw ParseError(std::string("missing field '") + key + "'", line_no);
    }
    Paper p;
    try {
      p.id = obj.at("id").is_string() ? obj.at("id").get<std::string>() : obj.at("id").dump();
      p.title = obj.at("title").get<std::string>();
      p.venue = obj.at("venue").get<std::string>();
      if (!obj.at("year").is_number_integer()) throw ParseError("year must be an integer", line_no);
      p.year = obj.at("year").get<int>();
      p.keywords = clean_keywords(obj.at("keywords").get<std::vector<std::string>>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad field type: ") + e.what(), line_no);
    }
    if (trim(p.id).empty()) throw ParseError("empty paper id", line_no);
    if (p.year < kMinYear || p.year > kMaxYear) {
      throw ParseError("year " + std::to_string(p.year) + " outside [1980, 2100]", line_no);
    }
    papers.push_back(std::move(p));
    lines.push_back(line_no);
  }
  check_unique(papers, lines);
  return papers;
}

}  // namespace detail

inline Corpus parse_corpus(std::string_view source, CorpusFormat format, std::string provenance = {},
                           KeywordKind kind = KeywordKind::author) {
  auto papers = format == CorpusFormat::delimited ? detail::parse_delimited(source) : detail::parse_records(source);
  return Corpus(std::move(papers), std::move(provenance), kind);
}

inline Corpus read_corpus_file(const std::filesystem::path& path, std::optional<CorpusFormat> format = std::nullopt,
                               KeywordKind kind = KeywordKind::author) {
  return parse_corpus(read_file(path), format.value_or(corpus_format_from_path(path)), path.string(), kind);
}

inline nlohmann::json paper_to_json(const Paper& p) {
  return nlohmann::json{{"id", p.id}, {"title", p.title}, {"venue", p.venue}, {"year", p.year}, {"keywords", p.keywords}};
}

inline std::string serialize_corpus(const Corpus& c, CorpusFormat format) {
  std::string out;
  if (format == CorpusFormat::delimited) {
    out = "id,title,venue,year,keywords\n";
    for (const auto& p : c.papers())
      out += csv::join_line({p.id, p.title, p.venue, std::to_string(p.year), join(p.keywords, ";")});
  } else {
    for (const auto& p : c.papers()) out += paper_to_json(p).dump() + "\n";
  }
  return out;
}

// Papers whose venue is in `venues` and whose year lies in `years`.
inline Corpus filter_corpus(const Corpus& c, const std::set<std::string>& venues, YearRange years) {
  std::vector<Paper> kept;
  for (const auto& p : c.papers())
    if (venues.count(p.venue) && years.contains(p.year)) kept.push_back(p);
  return Corpus(std::move(kept), c.provenance(), c.keyword_kind());
}

struct FrequencyEntry {
  std::string keyword;
  std::size_t count = 0;
  std::size_t rank = 0;

  friend bool operator==(const FrequencyEntry&, const FrequencyEntry&) = default;
};

class FrequencyTable {
 public:
  FrequencyTable() = default;

  // Takes (keyword, count) pairs in any order and assigns 1-based ranks by
  // descending count, ties ordered lexicographically.
  explicit FrequencyTable(std::vector<FrequencyEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const FrequencyEntry& a, const FrequencyEntry& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.keyword < b.keyword;
    });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      entries_[i].rank = i + 1;
      index_.emplace(entries_[i].keyword, i);
    }
  }

  const std::vector<FrequencyEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::size_t count_of(std::string_view keyword) const {
    auto it = index_.find(std::string(keyword));
    return it == index_.end() ? 0 : entries_[it->second].count;
  }

  const FrequencyEntry* find(std::string_view keyword) const {
    auto it = index_.find(std::string(keyword));
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  std::size_t total() const {
    std::size_t sum = 0;
    for (const auto& e : entries_) sum += e.count;
    return sum;
  }

 private:
  std::vector<FrequencyEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Per-paper presence counts; a keyword listed twice on one paper counts once.
inline FrequencyTable frequency_table(const Corpus& c) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : c.papers()) {
    std::unordered_set<std::string_view> seen;
    for (const auto& k : p.keywords)
      if (seen.insert(k).second) ++counts[k];
  }
  std::vector<FrequencyEntry> entries;
  entries.reserve(counts.size());
  for (auto& [k, n] : counts) entries.push_back({k, n, 0});
  return FrequencyTable(std::move(entries));
}

struct CorpusDigest {
  std::size_t papers = 0;
  std::size_t papers_with_keywords = 0;
  std::size_t unique_keywords = 0;
  std::size_t occurrences = 0;

  friend bool operator==(const CorpusDigest&, const CorpusDigest&) = default;
};

inline CorpusDigest digest(const Corpus& c) {
  const auto table = frequency_table(c);
  return {c.size(), c.size() - c.flagged_count(), table.size(), table.total()};
}

}  // namespace coword
