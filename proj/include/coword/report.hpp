#pragma once

// End-to-end analysis pipeline, the snapshot it produces, and every export
// derived from that snapshot.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "coword/cluster.hpp"
#include "coword/corpus.hpp"
#include "coword/matrix.hpp"
#include "coword/netmetrics.hpp"
#include "coword/normalize.hpp"
#include "coword/trends.hpp"
#include "coword/util.hpp"

namespace coword {

inline constexpr int kConfigVersion = 1;
inline constexpr int kSnapshotFormat = 1;

struct AnalysisConfig {
  std::size_t min_occurrence = 6;
  std::set<std::string> excluded{"information visualization", "scientific visualization", "visual analytics",
                                 "visualization"};
  std::size_t clusters = 16;
  Linkage linkage = Linkage::ward;
  Metric metric = Metric::squared_euclidean;
  std::optional<YearRange> years;  // nullopt: span of the corpus
  std::set<std::string> venues;    // empty: every venue
  std::size_t trend_top = 15;
  TrendMode trend_mode = TrendMode::raw;
  double graph_threshold = 0.13;
};

inline nlohmann::json config_to_json(const AnalysisConfig& c) {
  nlohmann::json j{{"version", kConfigVersion},
                   {"min_occurrence", c.min_occurrence},
                   {"excluded", c.excluded},
                   {"clusters", c.clusters},
                   {"linkage", to_string(c.linkage)},
                   {"metric", to_string(c.metric)},
                   {"venues", c.venues},
                   {"trend_top", c.trend_top},
                   {"trend_mode", c.trend_mode == TrendMode::raw ? "raw" : "share"},
                   {"graph_threshold", c.graph_threshold}};
  j["years"] = c.years ? nlohmann::json::array({c.years->first, c.years->last}) : nlohmann::json(nullptr);
  return j;
}

// Missing keys keep their defaults, so a config file may list only overrides.
inline AnalysisConfig config_from_json(const nlohmann::json& j) {
  AnalysisConfig c;
  if (j.contains("version") && j.at("version").get<int>() != kConfigVersion)
    throw Error("unsupported config version " + j.at("version").dump());
  if (j.contains("min_occurrence")) c.min_occurrence = j.at("min_occurrence").get<std::size_t>();
  if (j.contains("excluded")) {
    c.excluded.clear();
    for (const auto& term : j.at("excluded").get<std::vector<std::string>>()) c.excluded.insert(canonicalize(term));
  }
  if (j.contains("clusters")) c.clusters = j.at("clusters").get<std::size_t>();
  if (j.contains("linkage")) c.linkage = linkage_from_string(j.at("linkage").get<std::string>());
  if (j.contains("metric")) c.metric = metric_from_string(j.at("metric").get<std::string>());
  if (j.contains("years") && !j.at("years").is_null()) {
    const auto y = j.at("years").get<std::vector<int>>();
    if (y.size() != 2 || y[1] < y[0]) throw Error("years must be [first, last]");
    c.years = YearRange{y[0], y[1]};
  }
  if (j.contains("venues")) {
    const auto v = j.at("venues").get<std::vector<std::string>>();
    c.venues = {v.begin(), v.end()};
  }
  if (j.contains("trend_top")) c.trend_top = j.at("trend_top").get<std::size_t>();
  if (j.contains("trend_mode")) {
    const auto mode = j.at("trend_mode").get<std::string>();
    if (mode != "raw" && mode != "share") throw Error("trend_mode must be raw or share");
    c.trend_mode = mode == "raw" ? TrendMode::raw : TrendMode::share;
  }
  if (j.contains("graph_threshold")) c.graph_threshold = j.at("graph_threshold").get<double>();
  return c;
}

struct AnalysisSnapshot {
  AnalysisConfig config;
  YearRange years;
  Corpus corpus;  // after venue/year filtering
  CorpusDigest digest;
  FrequencyTable frequency;
  std::optional<PowerLawFit> powerlaw;
  DocTermMatrix matrix;
  CooccurrenceMatrix cooccurrence;
  CorrelationMatrix correlation;
  Dendrogram dendrogram;
  ClusterAssignment clusters;
  KeywordNetwork network;
  std::vector<ClusterMetrics> metrics;
  StrategicDiagram strategic;
  std::vector<TrendFit> trends;
  std::vector<std::string> warnings;

  // Members of a cluster ordered by occurrence count, then keyword.
  std::vector<std::string> members_by_frequency(int cluster) const {
    std::vector<std::string> out;
    for (auto i : clusters.members(cluster)) out.push_back(clusters.keywords[i]);
    std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
      const auto ca = frequency.count_of(a), cb = frequency.count_of(b);
      if (ca != cb) return ca > cb;
      return a < b;
    });
    return out;
  }

  std::optional<int> cluster_of(const std::string& keyword) const {
    for (std::size_t i = 0; i < clusters.keywords.size(); ++i)
      if (clusters.keywords[i] == keyword) return clusters.labels[i];
    return std::nullopt;
  }
};

namespace detail {

template <class F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace detail

// filter -> matrix -> correlation -> cluster -> network -> metrics -> diagram
// -> trends. The corpus is expected to be canonicalized already.
inline AnalysisSnapshot run_pipeline(const Corpus& input, const AnalysisConfig& config) {
  AnalysisSnapshot s;
  s.config = config;

  detail::run_stage("filter", [&] {
    const auto venues = config.venues.empty() ? input.venues() : config.venues;
    if (config.years) {
      s.years = *config.years;
    } else if (auto span = input.year_span()) {
      s.years = *span;
    } else {
      throw Error("corpus is empty");
    }
    s.corpus = filter_corpus(input, venues, s.years);
    if (s.corpus.empty()) throw Error("no papers match the venue/year filter");
    s.frequency = frequency_table(s.corpus);
    s.digest = digest(s.corpus);
    std::size_t usable = 0;
    for (const auto& e : s.frequency.entries()) usable += e.count >= 1;
    if (usable >= 3) {
      s.powerlaw = powerlaw_fit(s.frequency);
    } else {
      s.warnings.push_back("power-law fit skipped: fewer than 3 keywords");
    }
    return 0;
  });

  detail::run_stage("matrix", [&] {
    s.matrix = build_doc_term_matrix(s.corpus, config.min_occurrence, config.excluded);
    s.cooccurrence = cooccurrence(s.matrix);
    return 0;
  });

  detail::run_stage("correlation", [&] {
    s.correlation = correlation(s.matrix);
    for (auto r : s.correlation.constant_rows)
      s.warnings.push_back("keyword '" + s.correlation.keywords[r] + "' is on every paper; its correlations are set to 0");
    return 0;
  });

  detail::run_stage("cluster", [&] {
    validate_clustering(config.metric, config.linkage);
    std::vector<std::vector<double>> features;
    for (std::size_t i = 0; i < s.correlation.size(); ++i) features.push_back(s.correlation.values.row(i));
    const auto dist = pairwise_distances(features, config.metric);
    if (dist.zero_sum_pairs)
      s.warnings.push_back(std::to_string(dist.zero_sum_pairs) + " keyword pair(s) with zero bray-curtis denominator");
    s.dendrogram = agglomerate(dist, config.linkage, s.correlation.keywords);
    s.clusters = cut_to_k(s.dendrogram, config.clusters);
    return 0;
  });

  detail::run_stage("network", [&] {
    s.network = build_network(s.correlation, s.frequency);
    return 0;
  });
  detail::run_stage("metrics", [&] {
    s.metrics = cluster_metrics(s.network, s.clusters, s.cooccurrence, s.frequency);
    return 0;
  });
  detail::run_stage("diagram", [&] {
    s.strategic = strategic_diagram(s.metrics);
    return 0;
  });
  detail::run_stage("trends", [&] {
    if (s.years.size() >= 3) {
      s.trends = rank_trends(s.corpus, config.trend_top, s.years, config.trend_mode);
    } else {
      s.warnings.push_back("trend fits skipped: fewer than 3 years");
    }
    return 0;
  });
  return s;
}

// Most frequent keywords on papers from `venues` (all venues when empty),
// with `excluded` removed before ranking.
inline std::vector<FrequencyEntry> top_keywords(const Corpus& c, std::size_t n, const std::set<std::string>& venues,
                                                const std::set<std::string>& excluded) {
  const auto span = c.year_span();
  if (!span || n == 0) return {};
  const auto table = frequency_table(filter_corpus(c, venues.empty() ? c.venues() : venues, *span));
  std::vector<FrequencyEntry> out;
  for (const auto& e : table.entries()) {
    if (out.size() == n) break;
    if (excluded.count(e.keyword)) continue;
    out.push_back({e.keyword, e.count, out.size() + 1});
  }
  return out;
}

inline std::string frequency_to_csv(const std::vector<FrequencyEntry>& entries) {
  std::string out = "rank,keyword,count\n";
  for (const auto& e : entries) out += csv::join_line({std::to_string(e.rank), e.keyword, std::to_string(e.count)});
  return out;
}

// One row per cluster; members sorted by frequency, the two most frequent
// repeated in `top_keywords`.
inline std::string export_cluster_table(const AnalysisSnapshot& s) {
  std::string out = "cluster,n,median_freq,cw_freq,centrality,density,quadrant,top_keywords,keywords\n";
  for (const auto& m : s.metrics) {
    const auto members = s.members_by_frequency(m.cluster);
    std::vector<std::string> top(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(2, members.size())));
    std::string quadrant;
    for (const auto& p : s.strategic.points)
      if (p.cluster == m.cluster) quadrant = to_string(p.quadrant);
    out += csv::join_line({std::to_string(m.cluster), std::to_string(m.size), format_fixed(m.median_freq, 1),
                           format_fixed(m.cw_freq, 3), format_fixed(m.centrality), format_fixed(m.density), quadrant,
                           join(top, ";"), join(members, ";")});
  }
  return out;
}

// Node-link graph: every retained keyword is a node so that node clusters
// partition the keyword set; only edges with weight >= min_weight are kept
// and nodes left without edges are marked isolated.
inline nlohmann::json export_graph(const AnalysisSnapshot& s, double min_weight) {
  if (min_weight < 0.0) throw Error("graph threshold must be non-negative");
  std::vector<char> connected(s.network.nodes.size(), 0);
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : s.network.edges) {
    if (e.weight < min_weight) continue;
    connected[e.source] = connected[e.target] = 1;
    edges.push_back({{"source", e.source}, {"target", e.target}, {"weight", e.weight}});
  }
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < s.network.nodes.size(); ++i) {
    nodes.push_back({{"id", i},
                     {"label", s.network.nodes[i].keyword},
                     {"occurrences", s.network.nodes[i].occurrences},
                     {"cluster", s.clusters.labels[i]},
                     {"isolated", !connected[i]}});
  }
  return {{"threshold", min_weight}, {"nodes", nodes}, {"edges", edges}};
}

inline nlohmann::json export_strategic(const AnalysisSnapshot& s) {
  auto j = strategic_to_json(s.strategic);
  for (auto& p : j.at("points")) {
    const auto members = s.members_by_frequency(p.at("cluster").get<int>());
    p["label"] = std::vector<std::string>(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(2, members.size())));
  }
  return j;
}

inline std::string export_trends(const AnalysisSnapshot& s) { return trends_to_csv(s.trends); }

inline nlohmann::json digest_to_json(const CorpusDigest& d) {
  return {{"papers", d.papers},
          {"papers_with_keywords", d.papers_with_keywords},
          {"unique_keywords", d.unique_keywords},
          {"occurrences", d.occurrences}};
}

inline nlohmann::json powerlaw_to_json(const std::optional<PowerLawFit>& p) {
  if (!p) return nullptr;
  return {{"alpha", p->alpha}, {"r_squared", p->r_squared}, {"intercept", p->intercept},
          {"n_points", p->n_points}, {"degenerate", p->degenerate}};
}

inline nlohmann::json snapshot_to_json(const AnalysisSnapshot& s) {
  nlohmann::json papers = nlohmann::json::array();
  for (const auto& p : s.corpus.papers()) papers.push_back(paper_to_json(p));
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& m : s.metrics) metrics.push_back(metrics_to_json(m));
  nlohmann::json trends = nlohmann::json::array();
  for (const auto& t : s.trends) trends.push_back(trend_to_json(t));
  return {{"format", kSnapshotFormat},
          {"config", config_to_json(s.config)},
          {"years", {s.years.first, s.years.last}},
          {"keyword_kind", to_string(s.corpus.keyword_kind())},
          {"digest", digest_to_json(s.digest)},
          {"papers", papers},
          {"powerlaw", powerlaw_to_json(s.powerlaw)},
          {"matrix", doc_term_to_json(s.matrix)},
          {"cooccurrence", cooccurrence_to_json(s.cooccurrence)},
          {"correlation", correlation_to_json(s.correlation)},
          {"dendrogram", dendrogram_to_json(s.dendrogram)},
          {"clusters", {{"k", s.clusters.k}, {"labels", s.clusters.labels}}},
          {"metrics", metrics},
          {"strategic", strategic_to_json(s.strategic)},
          {"trends", trends},
          {"warnings", s.warnings}};
}

// Rejects snapshots whose parts disagree with each other.
inline void validate_snapshot(const AnalysisSnapshot& s) {
  auto fail = [](const std::string& what) { throw Error("invalid snapshot: " + what); };
  if (s.corpus.empty()) fail("no papers");
  const auto& kw = s.correlation.keywords;
  if (kw.size() < 2) fail("fewer than 2 analyzed keywords");
  if (s.matrix.keywords != kw || s.cooccurrence.keywords != kw || s.dendrogram.leaves != kw || s.clusters.keywords != kw)
    fail("keyword universes differ between matrix, correlation, dendrogram and clusters");
  if (s.dendrogram.merges.size() + 1 != kw.size()) fail("dendrogram merge count");
  if (s.clusters.k < 1 || static_cast<std::size_t>(s.clusters.k) > kw.size()) fail("cluster count");
  std::vector<std::size_t> sizes(static_cast<std::size_t>(s.clusters.k) + 1, 0);
  for (int label : s.clusters.labels) {
    if (label < 1 || label > s.clusters.k) fail("cluster label out of range");
    ++sizes[static_cast<std::size_t>(label)];
  }
  for (int c = 1; c <= s.clusters.k; ++c)
    if (sizes[static_cast<std::size_t>(c)] == 0) fail("empty cluster " + std::to_string(c));
  if (s.metrics.size() != sizes.size() - 1 || s.strategic.points.size() != s.metrics.size()) fail("metric count");
  for (const auto& m : s.metrics)
    if (m.size != sizes[static_cast<std::size_t>(m.cluster)]) fail("metric size for cluster " + std::to_string(m.cluster));
  if (digest(s.corpus) != s.digest) fail("digest does not match papers");
  for (const auto& k : kw)
    if (s.frequency.count_of(k) == 0) fail("analyzed keyword '" + k + "' never occurs");
}

inline AnalysisSnapshot snapshot_from_json(const nlohmann::json& j) {
  if (j.at("format").get<int>() != kSnapshotFormat) throw Error("unsupported snapshot format");
  AnalysisSnapshot s;
  s.config = config_from_json(j.at("config"));
  const auto years = j.at("years").get<std::vector<int>>();
  s.years = {years.at(0), years.at(1)};
  std::vector<Paper> papers;
  for (const auto& p : j.at("papers")) {
    papers.push_back({p.at("id").get<std::string>(), p.at("title").get<std::string>(), p.at("venue").get<std::string>(),
                      p.at("year").get<int>(), p.at("keywords").get<std::vector<std::string>>()});
  }
  s.corpus = Corpus(std::move(papers), "snapshot", keyword_kind_from_string(j.value("keyword_kind", "author")));
  s.frequency = frequency_table(s.corpus);
  const auto& d = j.at("digest");
  s.digest = {d.at("papers").get<std::size_t>(), d.at("papers_with_keywords").get<std::size_t>(),
              d.at("unique_keywords").get<std::size_t>(), d.at("occurrences").get<std::size_t>()};
  if (!j.at("powerlaw").is_null()) {
    const auto& p = j.at("powerlaw");
    s.powerlaw = PowerLawFit{p.at("alpha").get<double>(), p.at("r_squared").get<double>(),
                             p.at("intercept").get<double>(), p.at("n_points").get<std::size_t>(),
                             p.at("degenerate").get<bool>()};
  }
  {
    const auto& m = j.at("matrix");
    const auto cells = m.at("cells").get<std::vector<int>>();
    s.matrix.keywords = m.at("keywords").get<std::vector<std::string>>();
    s.matrix.papers = m.at("papers").get<std::vector<std::string>>();
    if (cells.size() != s.matrix.keywords.size() * s.matrix.papers.size()) throw Error("invalid snapshot: matrix cells");
    s.matrix.cells = DenseMatrix<std::uint8_t>(s.matrix.keywords.size(), s.matrix.papers.size());
    for (std::size_t r = 0; r < s.matrix.keywords.size(); ++r)
      for (std::size_t c = 0; c < s.matrix.papers.size(); ++c)
        s.matrix.cells(r, c) = static_cast<std::uint8_t>(cells[r * s.matrix.papers.size() + c]);
  }
  s.cooccurrence = cooccurrence_from_json(j.at("cooccurrence"));
  s.correlation = correlation_from_json(j.at("correlation"));
  s.dendrogram = dendrogram_from_json(j.at("dendrogram"));
  s.clusters = {s.correlation.keywords, j.at("clusters").at("labels").get<std::vector<int>>(),
                j.at("clusters").at("k").get<int>()};
  if (s.clusters.labels.size() != s.clusters.keywords.size()) throw Error("invalid snapshot: cluster labels");
  for (const auto& m : j.at("metrics")) s.metrics.push_back(metrics_from_json(m));
  s.network = build_network(s.correlation, s.frequency);
  if (s.metrics.empty()) throw Error("invalid snapshot: no cluster metrics");
  s.strategic = strategic_diagram(s.metrics);
  for (const auto& t : j.at("trends")) s.trends.push_back(trend_from_json(t));
  s.warnings = j.value("warnings", std::vector<std::string>{});
  validate_snapshot(s);
  return s;
}

inline constexpr const char* kSnapshotFile = "snapshot.json";

// Writes the snapshot plus every export into `dir`. Output is a pure function
// of the snapshot.
inline void write_snapshot(const AnalysisSnapshot& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / kSnapshotFile, snapshot_to_json(s).dump(1) + "\n");
  write_file(dir / "config.json", config_to_json(s.config).dump(2) + "\n");
  write_file(dir / "frequency.csv", frequency_to_csv(s.frequency.entries()));
  write_file(dir / "clusters.csv", export_cluster_table(s));
  write_file(dir / "graph.json", export_graph(s, s.config.graph_threshold).dump(1) + "\n");
  write_file(dir / "strategic.json", export_strategic(s).dump(2) + "\n");
  write_file(dir / "trends.csv", export_trends(s));
  write_file(dir / "dendrogram.json", dendrogram_to_json(s.dendrogram).dump(1) + "\n");
  write_file(dir / "correlation.json", correlation_to_json(s.correlation).dump() + "\n");
  write_file(dir / "matrix.json", doc_term_to_json(s.matrix).dump() + "\n");
}

inline AnalysisSnapshot load_snapshot(const std::filesystem::path& dir) {
  const auto path = std::filesystem::is_directory(dir) ? dir / kSnapshotFile : dir;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("cannot parse " + path.string() + ": " + e.what());
  }
  try {
    return snapshot_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid snapshot " + path.string() + ": " + e.what());
  }
}

}  // namespace coword
