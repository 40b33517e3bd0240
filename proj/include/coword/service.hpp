#pragma once

// Read-only query layer over an AnalysisSnapshot. Transport-free: handlers
// take a decoded path plus query parameters and return a status and a JSON
// body, so they can be exercised without a socket. See http_server.hpp for
// the HTTP binding.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coword/report.hpp"

namespace coword::service {

inline constexpr std::size_t kDefaultLimit = 50;
inline constexpr std::size_t kMaxLimit = 1000;
inline constexpr std::string_view kApiPrefix = "/api/v1/";

using Params = std::map<std::string, std::string>;

struct Response {
  int status = 200;
  nlohmann::json body;
};

inline Response error_response(int status, std::string code, std::string message) {
  return {status, {{"error", {{"code", std::move(code)}, {"message", std::move(message)}}}}};
}

inline std::string fold(std::string_view s) {
  std::string out(s);
  for (auto& ch : out)
    if (static_cast<unsigned char>(ch) < 0x80) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

// FNV-1a over the serialized snapshot; identifies a snapshot in /meta.
inline std::string snapshot_id(const AnalysisSnapshot& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : snapshot_to_json(s).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct SearchHit {
  std::string keyword;
  std::size_t count = 0;
  std::size_t rank = 0;
  std::optional<int> cluster;
};

struct Neighbor {
  std::string keyword;
  std::size_t count = 0;
  std::optional<double> correlation;
};

// Lookup structures derived from one snapshot; immutable once built.
class QueryIndex {
 public:
  explicit QueryIndex(std::shared_ptr<const AnalysisSnapshot> snapshot) : s_(std::move(snapshot)) {
    validate_snapshot(*s_);
    id_ = snapshot_id(*s_);
    const auto& papers = s_->corpus.papers();
    std::vector<std::size_t> order(papers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return papers[a].id < papers[b].id; });
    paper_order_ = order;
    for (std::size_t i : order)
      for (const auto& k : papers[i].keywords) papers_of_[k].push_back(i);
    for (const auto& e : s_->frequency.entries()) folded_.push_back(fold(e.keyword));
    for (std::size_t i = 0; i < s_->correlation.keywords.size(); ++i) {
      row_of_.emplace(s_->correlation.keywords[i], i);
      cluster_of_.emplace(s_->clusters.keywords[i], s_->clusters.labels[i]);
    }
  }

  const AnalysisSnapshot& snapshot() const noexcept { return *s_; }
  const std::string& id() const noexcept { return id_; }

  std::optional<int> cluster_of(const std::string& keyword) const {
    auto it = cluster_of_.find(keyword);
    if (it == cluster_of_.end()) return std::nullopt;
    return it->second;
  }

  // Case-insensitive substring match. Prefix matches come first, then higher
  // counts, then keyword order; an empty query matches everything.
  std::vector<SearchHit> search(std::string_view query) const {
    const auto q = fold(trim(query));
    struct Scored {
      bool prefix;
      const FrequencyEntry* entry;
    };
    std::vector<Scored> scored;
    const auto& entries = s_->frequency.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto pos = folded_[i].find(q);
      if (pos == std::string::npos) continue;
      scored.push_back({pos == 0, &entries[i]});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
      if (a.prefix != b.prefix) return a.prefix;
      if (a.entry->count != b.entry->count) return a.entry->count > b.entry->count;
      return a.entry->keyword < b.entry->keyword;
    });
    std::vector<SearchHit> hits;
    for (const auto& s : scored) hits.push_back({s.entry->keyword, s.entry->count, s.entry->rank, cluster_of(s.entry->keyword)});
    return hits;
  }

  const std::vector<std::size_t>* papers_with(const std::string& keyword) const {
    auto it = papers_of_.find(keyword);
    return it == papers_of_.end() ? nullptr : &it->second;
  }

  const std::vector<std::size_t>& all_papers() const noexcept { return paper_order_; }

  std::optional<double> correlation(const std::string& a, const std::string& b) const {
    auto ia = row_of_.find(a), ib = row_of_.find(b);
    if (ia == row_of_.end() || ib == row_of_.end()) return std::nullopt;
    return s_->correlation.values(ia->second, ib->second);
  }

  // Keywords sharing at least one paper with `keyword`, by shared-paper count,
  // then correlation (missing last), then keyword.
  std::vector<Neighbor> cooccurring(const std::string& keyword) const {
    std::map<std::string, std::size_t> counts;
    if (const auto* list = papers_with(keyword)) {
      for (std::size_t i : *list)
        for (const auto& other : s_->corpus.papers()[i].keywords)
          if (other != keyword) ++counts[other];
    }
    std::vector<Neighbor> out;
    for (auto& [k, n] : counts) out.push_back({k, n, correlation(keyword, k)});
    std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.count != b.count) return a.count > b.count;
      if (a.correlation.has_value() != b.correlation.has_value()) return a.correlation.has_value();
      if (a.correlation && *a.correlation != *b.correlation) return *a.correlation > *b.correlation;
      return a.keyword < b.keyword;
    });
    return out;
  }

  std::optional<TrendFit> trend(const std::string& keyword) const {
    if (s_->years.size() < 3) return std::nullopt;
    auto fit = linear_trend(yearly_counts(s_->corpus, keyword, s_->years, s_->config.trend_mode));
    fit.keyword = keyword;
    fit.total_count = s_->frequency.count_of(keyword);
    return fit;
  }

 private:
  std::shared_ptr<const AnalysisSnapshot> s_;
  std::string id_;
  std::vector<std::string> folded_;  // aligned with frequency entries
  std::vector<std::size_t> paper_order_;
  std::unordered_map<std::string, std::vector<std::size_t>> papers_of_;
  std::unordered_map<std::string, std::size_t> row_of_;
  std::unordered_map<std::string, int> cluster_of_;
};

// Holds the current index. Readers take a shared_ptr copy and keep using it
// for the whole request, so a swap never mixes two snapshots in one response.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::shared_ptr<const QueryIndex> index) { swap(std::move(index)); }

  std::shared_ptr<const QueryIndex> current() const {
    std::lock_guard lock(mutex_);
    return index_;
  }

  void swap(std::shared_ptr<const QueryIndex> index) {
    if (!index) throw Error("cannot install an empty snapshot");
    std::lock_guard lock(mutex_);
    index_ = std::move(index);
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const QueryIndex> index_;
};

inline std::shared_ptr<const QueryIndex> make_index(AnalysisSnapshot snapshot) {
  return std::make_shared<const QueryIndex>(std::make_shared<const AnalysisSnapshot>(std::move(snapshot)));
}

namespace detail {

inline std::optional<std::size_t> parse_size(const Params& params, const std::string& key, std::size_t fallback,
                                             std::string& error) {
  auto it = params.find(key);
  if (it == params.end() || it->second.empty()) return fallback;
  std::size_t value = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    error = key + " must be a non-negative integer";
    return std::nullopt;
  }
  return value;
}

struct Page {
  std::size_t offset = 0;
  std::size_t limit = kDefaultLimit;
};

inline std::optional<Page> parse_page(const Params& params, std::string& error) {
  auto limit = parse_size(params, "limit", kDefaultLimit, error);
  if (!limit) return std::nullopt;
  auto offset = parse_size(params, "offset", 0, error);
  if (!offset) return std::nullopt;
  if (*limit < 1 || *limit > kMaxLimit) {
    error = "limit must be between 1 and " + std::to_string(kMaxLimit);
    return std::nullopt;
  }
  return Page{*offset, *limit};
}

template <class T, class F>
nlohmann::json page_json(const std::vector<T>& items, const Page& page, F&& to_json) {
  nlohmann::json results = nlohmann::json::array();
  for (std::size_t i = page.offset; i < items.size() && i < page.offset + page.limit; ++i) results.push_back(to_json(items[i]));
  return {{"total", items.size()}, {"offset", page.offset}, {"limit", page.limit}, {"results", results}};
}

inline nlohmann::json optional_json(const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }
inline nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

inline nlohmann::json paper_summary(const Paper& p) {
  return {{"id", p.id}, {"title", p.title}, {"venue", p.venue}, {"year", p.year}};
}

inline nlohmann::json neighbor_json(const Neighbor& n) {
  return {{"keyword", n.keyword}, {"count", n.count}, {"correlation", optional_json(n.correlation)}};
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace detail

class Api {
 public:
  explicit Api(const SnapshotStore& store) : store_(store) {}

  // `path` is already percent-decoded.
  Response handle(std::string_view path, const Params& params = {}) const {
    const auto index = store_.current();
    if (path.substr(0, kApiPrefix.size()) != kApiPrefix) return error_response(404, "not_found", "unknown route");
    std::string_view route = path.substr(kApiPrefix.size());
    while (!route.empty() && route.back() == '/') route.remove_suffix(1);

    if (route == "meta") return meta(*index);
    if (route == "keywords") return search(*index, params);
    if (route == "papers") return papers(*index, params);
    if (route == "clusters") return clusters(*index);
    if (route == "strategic") return {200, export_strategic(index->snapshot())};
    if (route.substr(0, 9) == "clusters/") return cluster(*index, route.substr(9));
    if (route.substr(0, 9) == "keywords/") {
      auto rest = route.substr(9);
      if (detail::ends_with(rest, "/cooccurring")) return cooccurring(*index, rest.substr(0, rest.size() - 12), params);
      if (detail::ends_with(rest, "/trend")) return trend(*index, rest.substr(0, rest.size() - 6));
      return keyword(*index, rest);
    }
    return error_response(404, "not_found", "unknown route");
  }

 private:
  static Response unknown_keyword(std::string_view k) {
    return error_response(404, "not_found", "unknown keyword '" + std::string(k) + "'");
  }

  static Response meta(const QueryIndex& index) {
    const auto& s = index.snapshot();
    return {200,
            {{"snapshot_id", index.id()},
             {"digest", digest_to_json(s.digest)},
             {"config", config_to_json(s.config)},
             {"years", {s.years.first, s.years.last}},
             {"keyword_kind", to_string(s.corpus.keyword_kind())},
             {"analyzed_keywords", s.correlation.size()},
             {"clusters", s.clusters.k},
             {"powerlaw", powerlaw_to_json(s.powerlaw)},
             {"warnings", s.warnings}}};
  }

  static Response search(const QueryIndex& index, const Params& params) {
    std::string error;
    const auto page = detail::parse_page(params, error);
    if (!page) return error_response(400, "bad_request", error);
    auto q = params.count("q") ? params.at("q") : std::string{};
    auto body = detail::page_json(index.search(q), *page, [](const SearchHit& h) {
      return nlohmann::json{{"keyword", h.keyword}, {"count", h.count}, {"rank", h.rank},
                            {"cluster", detail::optional_json(h.cluster)}};
    });
    body["query"] = q;
    return {200, body};
  }

  static Response keyword(const QueryIndex& index, std::string_view raw) {
    const std::string k(raw);
    const auto* entry = index.snapshot().frequency.find(k);
    if (!entry) return unknown_keyword(k);
    nlohmann::json neighbors = nlohmann::json::array();
    for (const auto& n : index.cooccurring(k)) neighbors.push_back(detail::neighbor_json(n));
    nlohmann::json papers = nlohmann::json::array();
    for (std::size_t i : *index.papers_with(k)) papers.push_back(detail::paper_summary(index.snapshot().corpus.papers()[i]));
    const auto fit = index.trend(k);
    return {200,
            {{"keyword", k},
             {"count", entry->count},
             {"rank", entry->rank},
             {"cluster", detail::optional_json(index.cluster_of(k))},
             {"cooccurring", neighbors},
             {"papers", papers},
             {"trend", fit ? trend_to_json(*fit) : nlohmann::json(nullptr)}}};
  }

  static Response cooccurring(const QueryIndex& index, std::string_view raw, const Params& params) {
    const std::string k(raw);
    if (!index.snapshot().frequency.find(k)) return unknown_keyword(k);
    std::string error;
    const auto page = detail::parse_page(params, error);
    if (!page) return error_response(400, "bad_request", error);
    auto body = detail::page_json(index.cooccurring(k), *page, detail::neighbor_json);
    body["keyword"] = k;
    return {200, body};
  }

  static Response trend(const QueryIndex& index, std::string_view raw) {
    const std::string k(raw);
    if (!index.snapshot().frequency.find(k)) return unknown_keyword(k);
    const auto& s = index.snapshot();
    nlohmann::json series = nlohmann::json::array();
    for (const auto& yc : yearly_counts(s.corpus, k, s.years, s.config.trend_mode))
      series.push_back({{"year", yc.year}, {"count", yc.count}});
    const auto fit = index.trend(k);
    return {200, {{"keyword", k}, {"series", series}, {"fit", fit ? trend_to_json(*fit) : nlohmann::json(nullptr)}}};
  }

  static Response papers(const QueryIndex& index, const Params& params) {
    std::string error;
    const auto page = detail::parse_page(params, error);
    if (!page) return error_response(400, "bad_request", error);
    const std::vector<std::size_t>* list = &index.all_papers();
    std::string k;
    if (auto it = params.find("keyword"); it != params.end() && !it->second.empty()) {
      k = it->second;
      list = index.papers_with(k);
      if (!list) return unknown_keyword(k);
    }
    const auto& all = index.snapshot().corpus.papers();
    auto body = detail::page_json(*list, *page, [&](std::size_t i) {
      auto j = detail::paper_summary(all[i]);
      j["keywords"] = all[i].keywords;
      return j;
    });
    body["keyword"] = k.empty() ? nlohmann::json(nullptr) : nlohmann::json(k);
    return {200, body};
  }

  static nlohmann::json cluster_summary(const AnalysisSnapshot& s, const ClusterMetrics& m) {
    const auto members = s.members_by_frequency(m.cluster);
    const StrategicPoint* point = nullptr;
    for (const auto& p : s.strategic.points)
      if (p.cluster == m.cluster) point = &p;
    nlohmann::json j = metrics_to_json(m);
    j["id"] = m.cluster;
    j["top_keywords"] = std::vector<std::string>(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(2, members.size())));
    j["quadrant"] = point ? to_string(point->quadrant) : "";
    j["margin"] = point ? nlohmann::json{{"centrality", point->margin_x}, {"density", point->margin_y}} : nlohmann::json(nullptr);
    return j;
  }

  static Response clusters(const QueryIndex& index) {
    const auto& s = index.snapshot();
    nlohmann::json list = nlohmann::json::array();
    for (const auto& m : s.metrics) list.push_back(cluster_summary(s, m));
    return {200, {{"k", s.clusters.k}, {"clusters", list}}};
  }

  static Response cluster(const QueryIndex& index, std::string_view raw) {
    const auto& s = index.snapshot();
    int id = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), id);
    if (ec != std::errc{} || ptr != raw.data() + raw.size() || id < 1 || id > s.clusters.k)
      return error_response(404, "not_found", "unknown cluster '" + std::string(raw) + "'");
    auto j = cluster_summary(s, s.metrics[static_cast<std::size_t>(id - 1)]);
    nlohmann::json members = nlohmann::json::array();
    for (const auto& k : s.members_by_frequency(id)) members.push_back({{"keyword", k}, {"count", s.frequency.count_of(k)}});
    j["members"] = members;
    return {200, j};
  }

  const SnapshotStore& store_;
};

}  // namespace coword::service
