#include <filesystem>
#include <set>
#include <unistd.h>

#include <gtest/gtest.h>

#include "coword/report.hpp"
#include "fixture.hpp"

using namespace coword;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kExports{"snapshot.json", "config.json",    "frequency.csv",   "clusters.csv",
                                        "graph.json",    "strategic.json", "trends.csv",      "dendrogram.json",
                                        "correlation.json", "matrix.json"};

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("coword_report_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Config, JsonRoundTripAndDefaults) {
  AnalysisConfig c;
  c.years = YearRange{2004, 2013};
  c.venues = {"InfoVis"};
  c.linkage = Linkage::average;
  c.metric = Metric::bray_curtis;
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  const auto partial = config_from_json({{"clusters", 3}});
  EXPECT_EQ(partial.clusters, 3u);
  EXPECT_EQ(partial.min_occurrence, 6u);
  EXPECT_EQ(partial.excluded.size(), 4u);
  EXPECT_THROW(config_from_json({{"version", 2}}), Error);
  EXPECT_THROW(config_from_json({{"trend_mode", "log"}}), Error);
  EXPECT_THROW(config_from_json({{"years", {2013, 2004}}}), Error);
}

TEST(Pipeline, GoldenExports) {
  const auto dir = scratch("golden");
  write_snapshot(fixture::snapshot(), dir);
  const fs::path golden = fs::path(COWORD_GOLDEN) / "fixture";
  for (const auto& name : kExports) {
    ASSERT_TRUE(fs::exists(golden / name)) << name;
    EXPECT_EQ(read_file(dir / name), read_file(golden / name)) << name << " differs from golden";
  }
  fs::remove_all(dir);
}

TEST(Pipeline, Deterministic) {
  const auto a = scratch("a"), b = scratch("b");
  write_snapshot(fixture::snapshot(), a);
  write_snapshot(fixture::snapshot(), b);
  for (const auto& name : kExports) EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Pipeline, SnapshotReloadReproducesExports) {
  const auto a = scratch("orig"), b = scratch("reload");
  write_snapshot(fixture::snapshot(), a);
  write_snapshot(load_snapshot(a), b);
  for (const auto& name : kExports) EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Pipeline, FixtureShape) {
  const auto s = fixture::snapshot();
  EXPECT_EQ(s.digest.papers, 40u);
  EXPECT_EQ(s.clusters.k, 5);
  EXPECT_EQ(s.metrics.size(), 5u);
  EXPECT_EQ(s.trends.size(), 8u);
  for (const auto& k : s.correlation.keywords) {
    EXPECT_GE(s.frequency.count_of(k), 3u);
    EXPECT_FALSE(s.config.excluded.count(k));
  }
  ASSERT_TRUE(s.powerlaw.has_value());
  EXPECT_GT(s.powerlaw->alpha, 0.0);
  // the alias map merged variants before counting
  EXPECT_EQ(s.frequency.count_of("isosurface"), 0u);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(Pipeline, SingleCluster) {
  auto cfg = fixture::config();
  cfg.clusters = 1;
  const auto s = run_pipeline(fixture::corpus(), cfg);
  ASSERT_EQ(s.metrics.size(), 1u);
  EXPECT_EQ(s.metrics[0].size, s.correlation.size());
  EXPECT_EQ(s.metrics[0].centrality, 0.0);
  EXPECT_EQ(s.metrics[0].boundary_edges, 0u);
  EXPECT_EQ(s.strategic.points[0].quadrant, Quadrant::emerging);
}

TEST(Pipeline, AverageLinkageBrayCurtisFailsInClusterStage) {
  auto cfg = fixture::config();
  cfg.linkage = Linkage::average;
  cfg.metric = Metric::bray_curtis;
  try {
    run_pipeline(fixture::corpus(), cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "cluster");
  }
  cfg.metric = Metric::squared_euclidean;
  EXPECT_NO_THROW(run_pipeline(fixture::corpus(), cfg));
}

TEST(Pipeline, StageTaggedErrors) {
  auto stage_of = [](const Corpus& c, const AnalysisConfig& cfg) {
    try {
      run_pipeline(c, cfg);
    } catch (const StageError& e) {
      return e.stage();
    }
    return std::string("none");
  };
  auto cfg = fixture::config();
  cfg.years = YearRange{1990, 1991};
  EXPECT_EQ(stage_of(fixture::corpus(), cfg), "filter");
  cfg = fixture::config();
  cfg.min_occurrence = 1000;
  EXPECT_EQ(stage_of(fixture::corpus(), cfg), "matrix");
  cfg = fixture::config();
  cfg.clusters = 1000;
  EXPECT_EQ(stage_of(fixture::corpus(), cfg), "cluster");
  cfg = fixture::config();
  cfg.linkage = Linkage::ward;
  cfg.metric = Metric::bray_curtis;
  EXPECT_EQ(stage_of(fixture::corpus(), cfg), "cluster");
  EXPECT_EQ(stage_of(Corpus{}, fixture::config()), "filter");
}

TEST(Pipeline, ShortYearRangeSkipsTrends) {
  auto cfg = fixture::config();
  cfg.years = YearRange{2004, 2005};
  cfg.min_occurrence = 1;
  const auto s = run_pipeline(fixture::corpus(), cfg);
  EXPECT_TRUE(s.trends.empty());
  EXPECT_FALSE(s.warnings.empty());
}

TEST(Exports, GraphPartitionsKeywords) {
  const auto s = fixture::snapshot();
  const auto g = export_graph(s, 0.13);
  ASSERT_EQ(g["nodes"].size(), s.correlation.size());
  std::map<int, std::size_t> per_cluster;
  for (const auto& n : g["nodes"]) ++per_cluster[n["cluster"].get<int>()];
  for (const auto& m : s.metrics) EXPECT_EQ(per_cluster[m.cluster], m.size);
  const auto filtered = filter_network(s.network, 0.13);
  std::size_t connected = 0;
  for (const auto& n : g["nodes"]) connected += !n["isolated"].get<bool>();
  EXPECT_EQ(connected, filtered.nodes.size());
  EXPECT_EQ(g["edges"].size(), filtered.edges.size());
  for (const auto& e : g["edges"]) EXPECT_GE(e["weight"].get<double>(), 0.13);
  EXPECT_THROW(export_graph(s, -1), Error);
}

TEST(Exports, ClusterTableHeaderAndRows) {
  const auto s = fixture::snapshot();
  const auto table = export_cluster_table(s);
  const auto records = csv::read(table);
  ASSERT_EQ(records.size(), s.metrics.size() + 1);
  EXPECT_EQ(records[0].fields.size(), 9u);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto members = split(records[i].fields[8], ';');
    EXPECT_EQ(members.size(), s.metrics[i - 1].size);
  }
}

TEST(Exports, TopKeywordsPerVenue) {
  const auto c = fixture::corpus();
  const auto all = top_keywords(c, 3, {}, {});
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].rank, 1u);
  const auto excl = top_keywords(c, 3, {}, {all[0].keyword});
  EXPECT_EQ(excl[0].keyword, all[1].keyword);
  const auto vast = top_keywords(c, 50, {"VAST"}, {});
  const auto vast_table = frequency_table(filter_corpus(c, {"VAST"}, {2004, 2013}));
  for (const auto& e : vast) EXPECT_EQ(e.count, vast_table.count_of(e.keyword));
}

TEST(Snapshot, ValidationCatchesInconsistency) {
  auto s = fixture::snapshot();
  EXPECT_NO_THROW(validate_snapshot(s));
  auto bad = s;
  bad.metrics.pop_back();
  EXPECT_THROW(validate_snapshot(bad), Error);
  bad = s;
  bad.digest.papers += 1;
  EXPECT_THROW(validate_snapshot(bad), Error);
  auto j = snapshot_to_json(s);
  j["clusters"]["labels"][0] = 42;
  EXPECT_THROW(snapshot_from_json(j), Error);
  EXPECT_THROW(load_snapshot("/nonexistent/snapshot"), Error);
}
