#pragma once

// Agglomerative hierarchical clustering (Ward and average linkage via the
// Lance-Williams recurrence) and multi-coder consensus matrices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "coword/error.hpp"
#include "coword/matrix.hpp"
#include "coword/normalize.hpp"

namespace coword {

enum class Metric { squared_euclidean, bray_curtis };
enum class Linkage { ward, average };

inline std::string to_string(Metric m) { return m == Metric::squared_euclidean ? "sqeuclidean" : "braycurtis"; }
inline std::string to_string(Linkage l) { return l == Linkage::ward ? "ward" : "average"; }

inline Metric metric_from_string(std::string_view s) {
  if (s == "sqeuclidean" || s == "squared-euclidean") return Metric::squared_euclidean;
  if (s == "braycurtis" || s == "bray-curtis") return Metric::bray_curtis;
  throw Error("unknown metric '" + std::string(s) + "'");
}

inline Linkage linkage_from_string(std::string_view s) {
  if (s == "ward") return Linkage::ward;
  if (s == "average") return Linkage::average;
  throw Error("unknown linkage '" + std::string(s) + "'");
}

// Ward's recurrence is only meaningful on squared Euclidean distances.
inline void validate_clustering(Metric metric, Linkage linkage) {
  if (linkage == Linkage::ward && metric != Metric::squared_euclidean)
    throw Error("ward linkage requires the squared Euclidean metric");
}

struct DistanceMatrix {
  DenseMatrix<double> values;
  std::size_t zero_sum_pairs = 0;  // bray-curtis pairs with an all-zero sum, defined as 0

  std::size_t size() const noexcept { return values.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

inline double squared_euclidean(std::span<const double> u, std::span<const double> v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    sum += d * d;
  }
  return sum;
}

// Sum |u_i - v_i| / sum (u_i + v_i); nullopt when the denominator is zero.
inline std::optional<double> bray_curtis(std::span<const double> u, std::span<const double> v) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += std::abs(u[i] - v[i]);
    den += u[i] + v[i];
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

inline DistanceMatrix pairwise_distances(std::span<const std::vector<double>> vectors, Metric metric) {
  const std::size_t n = vectors.size();
  for (const auto& v : vectors) {
    if (v.size() != (n ? vectors[0].size() : 0)) throw Error("vectors must all have the same length");
    if (metric == Metric::bray_curtis && std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; }))
      throw Error("bray-curtis requires non-negative vectors");
  }
  DistanceMatrix d{DenseMatrix<double>(n, n), 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double value = 0.0;
      if (metric == Metric::squared_euclidean) {
        value = squared_euclidean(vectors[i], vectors[j]);
      } else if (auto bc = bray_curtis(vectors[i], vectors[j])) {
        value = *bc;
      } else {
        ++d.zero_sum_pairs;
      }
      d.values(i, j) = value;
      d.values(j, i) = value;
    }
  }
  return d;
}

struct Merge {
  std::size_t left = 0;   // smaller node id
  std::size_t right = 0;  // larger node id
  double height = 0.0;
  std::size_t id = 0;     // n + merge index
  std::size_t size = 0;   // leaves under the new node

  friend bool operator==(const Merge&, const Merge&) = default;
};

// Leaves are nodes 0..n-1; the i-th merge creates node n + i.
struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;

  std::size_t leaf_count() const noexcept { return leaves.size(); }
};

// Lance-Williams agglomeration over a full dissimilarity matrix. At each step
// the pair with the smallest dissimilarity is merged; exact ties go to the
// lexicographically smallest (left id, right id) pair. Heights are the
// updated dissimilarity at the moment of the merge.
inline Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage, std::vector<std::string> labels = {}) {
  const std::size_t n = dist.size();
  if (n == 0) throw Error("cannot cluster an empty set");
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) throw Error("label count does not match distance matrix size");
  for (double v : dist.values.data())
    if (!std::isfinite(v)) throw Error("distance matrix contains non-finite values");

  DenseMatrix<double> d = dist.values;
  std::vector<std::size_t> node(n), size(n, 1);
  std::iota(node.begin(), node.end(), std::size_t{0});
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});

  Dendrogram out{std::move(labels), {}};
  out.merges.reserve(n - 1);
  while (active.size() > 1) {
    std::size_t best_a = 0, best_b = 0;
    auto best_key = std::make_tuple(std::numeric_limits<double>::infinity(), std::numeric_limits<std::size_t>::max(),
                                    std::numeric_limits<std::size_t>::max());
    bool found = false;
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const std::size_t a = active[x], b = active[y];
        const auto key = std::make_tuple(d(a, b), std::min(node[a], node[b]), std::max(node[a], node[b]));
        if (!found || key < best_key) {
          best_key = key;
          best_a = x;
          best_b = y;
          found = true;
        }
      }
    }
    const std::size_t i = active[best_a], j = active[best_b];
    const double dij = d(i, j);
    const double ni = static_cast<double>(size[i]), nj = static_cast<double>(size[j]);
    for (std::size_t k : active) {
      if (k == i || k == j) continue;
      const double nk = static_cast<double>(size[k]);
      double updated = 0.0;
      if (linkage == Linkage::ward) {
        updated = ((ni + nk) * d(k, i) + (nj + nk) * d(k, j) - nk * dij) / (ni + nj + nk);
      } else {
        updated = (ni * d(k, i) + nj * d(k, j)) / (ni + nj);
      }
      d(k, i) = updated;
      d(i, k) = updated;
    }
    const std::size_t new_id = n + out.merges.size();
    out.merges.push_back({std::min(node[i], node[j]), std::max(node[i], node[j]), dij, new_id, size[i] + size[j]});
    node[i] = new_id;
    size[i] += size[j];
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  return out;
}

struct ClusterAssignment {
  std::vector<std::string> keywords;
  std::vector<int> labels;  // 1..k, aligned with keywords
  int k = 0;

  std::vector<std::size_t> members(int cluster) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cluster) out.push_back(i);
    return out;
  }
};

// Applies the first n - k merges. Cluster ids are 1..k in order of each
// cluster's smallest leaf index.
inline ClusterAssignment cut_to_k(const Dendrogram& dg, std::size_t k) {
  const std::size_t n = dg.leaf_count();
  if (k < 1 || k > n) throw Error("cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m < n - k; ++m) {
    const auto& merge = dg.merges[m];
    parent[find(merge.left)] = merge.id;
    parent[find(merge.right)] = merge.id;
  }
  ClusterAssignment out{dg.leaves, std::vector<int>(n, 0), static_cast<int>(k)};
  std::vector<int> label_of_root(2 * n, 0);
  int next = 0;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    int& label = label_of_root[find(leaf)];
    if (label == 0) label = ++next;
    out.labels[leaf] = label;
  }
  return out;
}

inline nlohmann::json dendrogram_to_json(const Dendrogram& dg) {
  nlohmann::json merges = nlohmann::json::array();
  for (const auto& m : dg.merges)
    merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"id", m.id}, {"size", m.size}});
  return {{"leaves", dg.leaves}, {"merges", merges}};
}

inline Dendrogram dendrogram_from_json(const nlohmann::json& j) {
  Dendrogram dg;
  dg.leaves = j.at("leaves").get<std::vector<std::string>>();
  for (const auto& m : j.at("merges")) {
    dg.merges.push_back({m.at("left").get<std::size_t>(), m.at("right").get<std::size_t>(),
                         m.at("height").get<double>(), m.at("id").get<std::size_t>(), m.value("size", std::size_t{0})});
  }
  if (!dg.leaves.empty() && dg.merges.size() != dg.leaves.size() - 1)
    throw Error("dendrogram must have exactly n-1 merges");
  return dg;
}

// One coder's co-cluster indicator: entry (a, b) is 1 iff the coder assigned
// both keywords at least one common code. The diagonal marks coverage.
struct CoClusterIndicator {
  std::vector<std::string> keywords;
  DenseMatrix<std::uint8_t> values;
};

inline CoClusterIndicator co_cluster_indicator(const CodeMap& map, const std::vector<std::string>& keywords) {
  const std::size_t n = keywords.size();
  CoClusterIndicator out{keywords, DenseMatrix<std::uint8_t>(n, n)};
  std::vector<const std::set<std::string>*> codes(n);
  for (std::size_t i = 0; i < n; ++i) codes[i] = map.codes_for(keywords[i]);
  for (std::size_t i = 0; i < n; ++i) {
    if (!codes[i]) continue;
    out.values(i, i) = 1;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!codes[j]) continue;
      const bool shared = std::any_of(codes[i]->begin(), codes[i]->end(),
                                      [&](const std::string& c) { return codes[j]->count(c) > 0; });
      out.values(i, j) = out.values(j, i) = shared ? 1 : 0;
    }
  }
  return out;
}

struct ConsensusMatrix {
  std::vector<std::string> keywords;
  DenseMatrix<int> counts;
  int coders = 0;
};

inline ConsensusMatrix consensus_matrix(std::span<const CoClusterIndicator> indicators) {
  if (indicators.empty()) throw Error("consensus needs at least one coder");
  const auto& universe = indicators.front().keywords;
  const std::size_t n = universe.size();
  ConsensusMatrix out{universe, DenseMatrix<int>(n, n), static_cast<int>(indicators.size())};
  for (const auto& ind : indicators) {
    if (ind.keywords != universe) throw Error("coders disagree on the keyword universe");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.counts(i, j) += ind.values(i, j);
  }
  return out;
}

// Bray-Curtis distances between consensus rows, then average linkage.
inline Dendrogram consensus_dendrogram(const ConsensusMatrix& m, std::size_t* zero_sum_pairs = nullptr) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < m.keywords.size(); ++i) {
    std::vector<double> r(m.keywords.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = m.counts(i, j);
    rows.push_back(std::move(r));
  }
  const auto dist = pairwise_distances(rows, Metric::bray_curtis);
  if (zero_sum_pairs) *zero_sum_pairs = dist.zero_sum_pairs;
  return agglomerate(dist, Linkage::average, m.keywords);
}

}  // namespace coword
