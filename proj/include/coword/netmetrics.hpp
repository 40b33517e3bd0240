#pragma once

// Keyword network, per-cluster density/centrality and strategic diagrams.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "coword/cluster.hpp"
#include "coword/corpus.hpp"
#include "coword/matrix.hpp"
#include "coword/stats.hpp"

namespace coword {

struct NetworkNode {
  std::string keyword;
  std::size_t occurrences = 0;
};

struct NetworkEdge {
  std::size_t source = 0;  // source < target, indices into nodes
  std::size_t target = 0;
  double weight = 0.0;

  friend bool operator==(const NetworkEdge&, const NetworkEdge&) = default;
};

struct KeywordNetwork {
  std::vector<NetworkNode> nodes;
  std::vector<NetworkEdge> edges;  // sorted by (source, target)
};

// Links every keyword pair with strictly positive correlation.
inline KeywordNetwork build_network(const CorrelationMatrix& corr, const FrequencyTable& occurrences) {
  KeywordNetwork net;
  const std::size_t n = corr.size();
  for (const auto& k : corr.keywords) net.nodes.push_back({k, occurrences.count_of(k)});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (corr.values(i, j) > 0.0) net.edges.push_back({i, j, corr.values(i, j)});
  return net;
}

// Keeps edges with weight >= min_weight and drops nodes left without edges.
inline KeywordNetwork filter_network(const KeywordNetwork& net, double min_weight) {
  if (min_weight < 0.0) throw Error("minimum edge weight must be non-negative");
  std::vector<char> connected(net.nodes.size(), 0);
  std::vector<NetworkEdge> kept;
  for (const auto& e : net.edges) {
    if (e.weight >= min_weight) {
      kept.push_back(e);
      connected[e.source] = connected[e.target] = 1;
    }
  }
  KeywordNetwork out;
  std::vector<std::size_t> remap(net.nodes.size(), 0);
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    if (!connected[i]) continue;
    remap[i] = out.nodes.size();
    out.nodes.push_back(net.nodes[i]);
  }
  for (auto e : kept) {
    e.source = remap[e.source];
    e.target = remap[e.target];
    out.edges.push_back(e);
  }
  return out;
}

struct ClusterMetrics {
  int cluster = 0;
  std::size_t size = 0;         // N
  double median_freq = 0.0;     // median occurrence count of members
  double cw_freq = 0.0;         // mean co-occurrence count over member pairs
  double density = 0.0;         // median internal edge weight
  double centrality = 0.0;      // sum of squared boundary edge weights
  std::size_t internal_edges = 0;
  std::size_t boundary_edges = 0;
};

// Network, assignment and co-occurrence matrix must share one keyword order.
inline std::vector<ClusterMetrics> cluster_metrics(const KeywordNetwork& net, const ClusterAssignment& assign,
                                                   const CooccurrenceMatrix& cooc, const FrequencyTable& freq) {
  const std::size_t n = net.nodes.size();
  if (assign.labels.size() != n || cooc.keywords.size() != n) throw Error("inconsistent keyword universes");
  for (std::size_t i = 0; i < n; ++i) {
    if (assign.keywords[i] != net.nodes[i].keyword || cooc.keywords[i] != net.nodes[i].keyword)
      throw Error("inconsistent keyword order at index " + std::to_string(i));
  }

  std::vector<ClusterMetrics> out;
  std::vector<std::vector<double>> internal(static_cast<std::size_t>(assign.k) + 1);
  std::vector<double> boundary(static_cast<std::size_t>(assign.k) + 1, 0.0);
  std::vector<std::size_t> boundary_count(static_cast<std::size_t>(assign.k) + 1, 0);
  for (const auto& e : net.edges) {
    const auto a = static_cast<std::size_t>(assign.labels[e.source]);
    const auto b = static_cast<std::size_t>(assign.labels[e.target]);
    if (a == b) {
      internal[a].push_back(e.weight);
    } else {
      const double w2 = e.weight * e.weight;
      boundary[a] += w2;
      boundary[b] += w2;
      ++boundary_count[a];
      ++boundary_count[b];
    }
  }

  for (int c = 1; c <= assign.k; ++c) {
    const auto members = assign.members(c);
    ClusterMetrics m;
    m.cluster = c;
    m.size = members.size();
    std::vector<double> freqs;
    for (auto i : members) freqs.push_back(static_cast<double>(freq.count_of(assign.keywords[i])));
    m.median_freq = stats::median(freqs);
    if (members.size() > 1) {
      double sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t x = 0; x < members.size(); ++x) {
        for (std::size_t y = x + 1; y < members.size(); ++y) {
          sum += static_cast<double>(cooc.counts(members[x], members[y]));
          ++pairs;
        }
      }
      m.cw_freq = sum / static_cast<double>(pairs);
    }
    const auto uc = static_cast<std::size_t>(c);
    m.internal_edges = internal[uc].size();
    m.density = stats::median(internal[uc]);
    m.centrality = boundary[uc];
    m.boundary_edges = boundary_count[uc];
    out.push_back(m);
  }
  return out;
}

enum class Quadrant { motor = 1, basic = 2, isolated = 3, emerging = 4 };

inline std::string to_string(Quadrant q) {
  switch (q) {
    case Quadrant::motor: return "I";
    case Quadrant::basic: return "II";
    case Quadrant::isolated: return "III";
    case Quadrant::emerging: return "IV";
  }
  return "IV";
}

inline std::string describe(Quadrant q) {
  switch (q) {
    case Quadrant::motor: return "motor themes";
    case Quadrant::basic: return "basic and transversal themes";
    case Quadrant::isolated: return "developed but isolated themes";
    case Quadrant::emerging: return "emerging or declining themes";
  }
  return "";
}

struct StrategicPoint {
  int cluster = 0;
  double centrality = 0.0;  // x
  double density = 0.0;     // y
  Quadrant quadrant = Quadrant::emerging;
  double margin_x = 0.0;    // |x - median_x|
  double margin_y = 0.0;    // |y - median_y|
};

struct StrategicDiagram {
  double median_centrality = 0.0;
  double median_density = 0.0;
  std::vector<StrategicPoint> points;
};

// Quadrant from a median split; values equal to a median fall on the low side.
inline Quadrant classify(double x, double y, double median_x, double median_y) {
  const bool high_x = x > median_x, high_y = y > median_y;
  if (high_x && high_y) return Quadrant::motor;
  if (high_x) return Quadrant::basic;
  if (high_y) return Quadrant::isolated;
  return Quadrant::emerging;
}

inline StrategicDiagram strategic_diagram(const std::vector<ClusterMetrics>& metrics) {
  if (metrics.empty()) throw Error("strategic diagram needs at least one cluster");
  std::vector<double> xs, ys;
  for (const auto& m : metrics) {
    xs.push_back(m.centrality);
    ys.push_back(m.density);
  }
  StrategicDiagram out{stats::median(xs), stats::median(ys), {}};
  for (const auto& m : metrics) {
    out.points.push_back({m.cluster, m.centrality, m.density,
                          classify(m.centrality, m.density, out.median_centrality, out.median_density),
                          std::abs(m.centrality - out.median_centrality), std::abs(m.density - out.median_density)});
  }
  return out;
}

inline nlohmann::json metrics_to_json(const ClusterMetrics& m) {
  return {{"cluster", m.cluster},       {"n", m.size},
          {"median_freq", m.median_freq}, {"cw_freq", m.cw_freq},
          {"density", m.density},       {"centrality", m.centrality},
          {"internal_edges", m.internal_edges}, {"boundary_edges", m.boundary_edges}};
}

inline ClusterMetrics metrics_from_json(const nlohmann::json& j) {
  ClusterMetrics m;
  m.cluster = j.at("cluster").get<int>();
  m.size = j.at("n").get<std::size_t>();
  m.median_freq = j.at("median_freq").get<double>();
  m.cw_freq = j.at("cw_freq").get<double>();
  m.density = j.at("density").get<double>();
  m.centrality = j.at("centrality").get<double>();
  m.internal_edges = j.value("internal_edges", std::size_t{0});
  m.boundary_edges = j.value("boundary_edges", std::size_t{0});
  return m;
}

inline nlohmann::json strategic_to_json(const StrategicDiagram& d) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : d.points) {
    points.push_back({{"cluster", p.cluster},
                      {"centrality", p.centrality},
                      {"density", p.density},
                      {"quadrant", to_string(p.quadrant)},
                      {"theme", describe(p.quadrant)},
                      {"margin", {{"centrality", p.margin_x}, {"density", p.margin_y}}}});
  }
  return {{"median_centrality", d.median_centrality}, {"median_density", d.median_density}, {"points", points}};
}

}  // namespace coword
