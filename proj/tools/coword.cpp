// coword command-line driver: ingest, normalize, analyze, trends, export,
// serve, top, consensus.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "coword/http_server.hpp"
#include "coword/report.hpp"
#include "coword/service.hpp"

namespace fs = std::filesystem;
using namespace coword;

namespace {

std::atomic<bool> g_reload{false};
std::atomic<bool> g_stop{false};

std::optional<CorpusFormat> parse_format(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name == "csv") return CorpusFormat::delimited;
  if (name == "jsonl") return CorpusFormat::records;
  throw Error("unknown corpus format '" + name + "' (expected csv or jsonl)");
}

// explicit flag wins, then the output extension, then jsonl
CorpusFormat output_format(const std::string& flag, const std::string& out_path) {
  if (auto f = parse_format(flag)) return *f;
  if (out_path.size() >= 4 && out_path.compare(out_path.size() - 4, 4, ".csv") == 0) return CorpusFormat::delimited;
  return CorpusFormat::records;
}

std::set<std::string> parse_list(const std::string& s, bool canonical) {
  std::set<std::string> out;
  if (s.empty()) return out;
  for (const auto& part : split(s, ',')) {
    if (trim(part).empty()) continue;
    out.insert(canonical ? canonicalize(part) : std::string(trim(part)));
  }
  return out;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    write_file(out_path, content);
  }
}

// Canonical keywords plus an optional alias map.
Corpus load_normalized(const std::string& path, const std::string& format, const std::string& alias_path) {
  auto corpus = canonicalize_corpus(read_corpus_file(path, parse_format(format)));
  if (!alias_path.empty()) corpus = apply_alias_map(corpus, parse_alias_map(read_file(alias_path)));
  return corpus;
}

std::string graph_nodes_csv(const nlohmann::json& graph) {
  std::string out = "id,label,occurrences,cluster,isolated\n";
  for (const auto& n : graph.at("nodes")) {
    out += csv::join_line({n.at("id").dump(), n.at("label").get<std::string>(), n.at("occurrences").dump(),
                           n.at("cluster").dump(), n.at("isolated").get<bool>() ? "true" : "false"});
  }
  return out;
}

std::string graph_edges_csv(const nlohmann::json& graph) {
  std::string out = "source,target,weight\n";
  for (const auto& e : graph.at("edges"))
    out += csv::join_line({e.at("source").dump(), e.at("target").dump(), format_fixed(e.at("weight").get<double>())});
  return out;
}

std::string strategic_csv(const AnalysisSnapshot& s) {
  std::string out = "cluster,centrality,density,quadrant,margin_centrality,margin_density,median_centrality,median_density\n";
  for (const auto& p : s.strategic.points) {
    out += csv::join_line({std::to_string(p.cluster), format_fixed(p.centrality), format_fixed(p.density),
                           to_string(p.quadrant), format_fixed(p.margin_x), format_fixed(p.margin_y),
                           format_fixed(s.strategic.median_centrality), format_fixed(s.strategic.median_density)});
  }
  return out;
}

void write_exports(const AnalysisSnapshot& s, const fs::path& dir, double threshold, const std::string& format) {
  fs::create_directories(dir);
  write_file(dir / "clusters.csv", export_cluster_table(s));
  write_file(dir / "trends.csv", export_trends(s));
  const auto graph = export_graph(s, threshold);
  if (format == "json") {
    write_file(dir / "graph.json", graph.dump(1) + "\n");
    write_file(dir / "strategic.json", export_strategic(s).dump(2) + "\n");
  } else {
    write_file(dir / "graph_nodes.csv", graph_nodes_csv(graph));
    write_file(dir / "graph_edges.csv", graph_edges_csv(graph));
    write_file(dir / "strategic.csv", strategic_csv(s));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coword: co-word analysis of keyword-tagged publication corpora"};
  app.require_subcommand(1);
  std::string stage = "cli";

  // ingest
  std::string in_path, in_format, out_path;
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus file and write it as JSON records");
  ingest->add_option("corpus", in_path, "Corpus file (.csv or .jsonl)")->required()->check(CLI::ExistingFile);
  ingest->add_option("--format", in_format, "csv or jsonl (default: by extension)");
  ingest->add_option("-o,--out", out_path, "Output file (default: stdout)");

  // normalize
  std::string alias_path, codes_path, coder, norm_format;
  bool lenient = false, keep_case = false, keep_space = false, keep_punct = false;
  auto* normalize = app.add_subcommand("normalize", "Canonicalize keywords and apply alias/code maps");
  normalize->add_option("corpus", in_path)->required()->check(CLI::ExistingFile);
  normalize->add_option("--format", in_format);
  normalize->add_option("--alias", alias_path, "Alias map CSV (raw,canonical)")->check(CLI::ExistingFile);
  normalize->add_option("--codes", codes_path, "Code map CSV (keyword,codes,coder_id)")->check(CLI::ExistingFile);
  normalize->add_option("--coder", coder, "Coder id to apply (default: first in file)");
  normalize->add_flag("--lenient", lenient, "Drop keywords missing from the code map");
  normalize->add_flag("--keep-case", keep_case);
  normalize->add_flag("--keep-whitespace", keep_space);
  normalize->add_flag("--keep-punctuation", keep_punct);
  normalize->add_option("--out-format", norm_format, "csv or jsonl (default: from -o extension, else jsonl)");
  normalize->add_option("-o,--out", out_path);

  // analyze
  std::string config_path, snapshot_dir, exclude, years, venues, linkage, metric;
  std::optional<std::size_t> min_occ, clusters, trend_top;
  auto* analyze = app.add_subcommand("analyze", "Run the full pipeline and write a snapshot directory");
  analyze->add_option("corpus", in_path)->required()->check(CLI::ExistingFile);
  analyze->add_option("--format", in_format);
  analyze->add_option("--out", snapshot_dir, "Snapshot directory")->required();
  analyze->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  analyze->add_option("--alias", alias_path)->check(CLI::ExistingFile);
  analyze->add_option("--min-occurrence", min_occ);
  analyze->add_option("--exclude", exclude, "Comma-separated keywords to exclude");
  analyze->add_option("--clusters", clusters);
  analyze->add_option("--linkage", linkage)->check(CLI::IsMember({"ward", "average"}));
  analyze->add_option("--metric", metric)->check(CLI::IsMember({"sqeuclidean", "braycurtis"}));
  analyze->add_option("--years", years, "e.g. 2004-2013");
  analyze->add_option("--venues", venues, "Comma-separated venues");
  analyze->add_option("--trend-top", trend_top);

  // trends
  std::size_t top_n = 15;
  bool share = false;
  auto* trends = app.add_subcommand("trends", "Linear trends for the most frequent keywords");
  trends->add_option("corpus", in_path)->required()->check(CLI::ExistingFile);
  trends->add_option("--format", in_format);
  trends->add_option("--top", top_n)->check(CLI::PositiveNumber);
  trends->add_option("--years", years);
  trends->add_option("--venues", venues);
  trends->add_option("--alias", alias_path)->check(CLI::ExistingFile);
  trends->add_flag("--share", share, "Fit yearly share of papers instead of raw counts");
  trends->add_option("-o,--out", out_path);

  // export
  std::optional<double> graph_threshold;
  std::string export_format = "json", export_dir;
  auto* exp = app.add_subcommand("export", "Write tables, graph and strategic-diagram data from a snapshot");
  exp->add_option("--snapshot", snapshot_dir)->required();
  exp->add_option("--out", export_dir)->required();
  exp->add_option("--graph-threshold", graph_threshold);
  exp->add_option("--format", export_format)->check(CLI::IsMember({"json", "csv"}));

  // serve
  int port = 8080;
  std::string bind = "127.0.0.1", static_dir;
  auto* serve = app.add_subcommand("serve", "Serve the read-only JSON API over a snapshot");
  serve->add_option("--snapshot", snapshot_dir)->required();
  serve->add_option("--port", port);
  serve->add_option("--bind", bind);
  serve->add_option("--static", static_dir, "Directory with a web UI (index.html)");

  // top
  std::size_t n_top = 10;
  auto* top = app.add_subcommand("top", "Most frequent keywords, optionally per venue");
  top->add_option("corpus", in_path)->required()->check(CLI::ExistingFile);
  top->add_option("--format", in_format);
  top->add_option("-n", n_top);
  top->add_option("--venues", venues);
  top->add_option("--exclude", exclude);
  top->add_option("--alias", alias_path)->check(CLI::ExistingFile);

  // consensus
  auto* consensus = app.add_subcommand("consensus", "Average-linkage Bray-Curtis clustering of multi-coder code maps");
  consensus->add_option("codes", codes_path)->required()->check(CLI::ExistingFile);
  consensus->add_option("--clusters", clusters);
  consensus->add_option("-o,--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      stage = "ingest";
      const auto corpus = read_corpus_file(in_path, parse_format(in_format));
      std::cerr << "ingest: " << corpus.size() << " papers, " << corpus.flagged_count()
                << " without keywords\n";
      emit(out_path, serialize_corpus(corpus, CorpusFormat::records));
    } else if (*normalize) {
      stage = "normalize";
      NormalizationRules rules{!keep_case, !keep_space, !keep_punct};
      auto corpus = canonicalize_corpus(read_corpus_file(in_path, parse_format(in_format)), rules);
      if (!alias_path.empty()) corpus = apply_alias_map(corpus, parse_alias_map(read_file(alias_path), rules));
      if (!codes_path.empty()) {
        const auto maps = parse_code_maps(read_file(codes_path), rules);
        if (maps.empty()) throw Error("code map file is empty");
        const CodeMap* chosen = &maps.front();
        if (!coder.empty()) {
          chosen = nullptr;
          for (const auto& m : maps)
            if (m.coder_id == coder) chosen = &m;
          if (!chosen) throw Error("no coder '" + coder + "' in " + codes_path);
        }
        auto result = apply_code_map(corpus, *chosen, lenient ? CodeMapMode::lenient : CodeMapMode::strict);
        for (const auto& [k, n] : result.unmapped) std::cerr << "normalize: dropped unmapped '" << k << "' (" << n << ")\n";
        corpus = std::move(result.corpus);
      }
      const auto d = digest(corpus);
      std::cerr << "normalize: " << d.unique_keywords << " unique keywords, " << d.occurrences << " occurrences\n";
      emit(out_path, serialize_corpus(corpus, output_format(norm_format, out_path)));
    } else if (*analyze) {
      stage = "analyze";
      AnalysisConfig config;
      if (!config_path.empty()) config = config_from_json(nlohmann::json::parse(read_file(config_path)));
      if (min_occ) config.min_occurrence = *min_occ;
      if (!exclude.empty()) config.excluded = parse_list(exclude, true);
      if (clusters) config.clusters = *clusters;
      if (!linkage.empty()) config.linkage = linkage_from_string(linkage);
      if (!metric.empty()) config.metric = metric_from_string(metric);
      if (!years.empty()) config.years = parse_year_range(years);
      if (!venues.empty()) config.venues = parse_list(venues, false);
      if (trend_top) config.trend_top = *trend_top;
      const auto corpus = load_normalized(in_path, in_format, alias_path);
      const auto snapshot = run_pipeline(corpus, config);
      for (const auto& w : snapshot.warnings) std::cerr << "analyze: warning: " << w << "\n";
      write_snapshot(snapshot, snapshot_dir);
      std::cerr << "analyze: " << snapshot.digest.papers << " papers, " << snapshot.correlation.size()
                << " keywords analyzed, " << snapshot.clusters.k << " clusters -> " << snapshot_dir << "\n";
    } else if (*trends) {
      stage = "trends";
      auto corpus = load_normalized(in_path, in_format, alias_path);
      if (!venues.empty()) corpus = filter_corpus(corpus, parse_list(venues, false), {kMinYear, kMaxYear});
      YearRange range;
      if (!years.empty()) {
        range = parse_year_range(years);
      } else if (auto span = corpus.year_span()) {
        range = *span;
      } else {
        throw Error("corpus is empty");
      }
      emit(out_path, trends_to_csv(rank_trends(corpus, top_n, range, share ? TrendMode::share : TrendMode::raw)));
    } else if (*exp) {
      stage = "export";
      const auto snapshot = load_snapshot(snapshot_dir);
      write_exports(snapshot, export_dir, graph_threshold.value_or(snapshot.config.graph_threshold), export_format);
    } else if (*serve) {
      stage = "serve";
      service::SnapshotStore store(service::make_index(load_snapshot(snapshot_dir)));
      std::optional<fs::path> ui;
      if (!static_dir.empty()) ui = static_dir;
      service::HttpServer server(store, ui);
      std::signal(SIGHUP, [](int) { g_reload = true; });
      std::signal(SIGINT, [](int) { g_stop = true; });
      std::signal(SIGTERM, [](int) { g_stop = true; });
      std::thread admin([&] {
        while (!g_stop) {
          std::this_thread::sleep_for(std::chrono::milliseconds(200));
          if (g_reload.exchange(false)) {
            try {
              store.swap(service::make_index(load_snapshot(snapshot_dir)));
              std::cerr << "serve: snapshot reloaded\n";
            } catch (const std::exception& e) {
              std::cerr << "serve: reload failed, keeping current snapshot: " << e.what() << "\n";
            }
          }
        }
        server.stop();
      });
      std::cerr << "serve: listening on http://" << bind << ":" << port << "\n";
      const bool ok = server.listen(bind, port);
      g_stop = true;
      admin.join();
      if (!ok) throw Error("cannot listen on " + bind + ":" + std::to_string(port));
    } else if (*top) {
      stage = "top";
      const auto corpus = load_normalized(in_path, in_format, alias_path);
      std::cout << frequency_to_csv(top_keywords(corpus, n_top, parse_list(venues, false), parse_list(exclude, true)));
    } else if (*consensus) {
      stage = "consensus";
      const auto maps = parse_code_maps(read_file(codes_path));
      std::set<std::string> universe;
      for (const auto& m : maps)
        for (const auto& [k, codes] : m.entries) universe.insert(k);
      const std::vector<std::string> keywords(universe.begin(), universe.end());
      std::vector<CoClusterIndicator> indicators;
      for (const auto& m : maps) indicators.push_back(co_cluster_indicator(m, keywords));
      const auto matrix = consensus_matrix(indicators);
      const auto dg = consensus_dendrogram(matrix);
      nlohmann::json out{{"coders", matrix.coders}, {"dendrogram", dendrogram_to_json(dg)}};
      if (clusters) {
        const auto assign = cut_to_k(dg, *clusters);
        nlohmann::json labels = nlohmann::json::object();
        for (std::size_t i = 0; i < assign.keywords.size(); ++i) labels[assign.keywords[i]] = assign.labels[i];
        out["clusters"] = labels;
      }
      emit(out_path, out.dump(2) + "\n");
    }
  } catch (const StageError& e) {
    std::cerr << "coword " << stage << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "coword " << stage << ": [" << stage << "] " << e.what() << "\n";
    return 1;
  }
  return 0;
}
