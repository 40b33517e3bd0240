#pragma once

// Binary document-keyword matrices, co-occurrence counts and Pearson
// correlation between keyword rows.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "coword/corpus.hpp"
#include "coword/error.hpp"

namespace coword {

// Row-major dense matrix.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T> row(std::size_t r) const {
    return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }

  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Keywords are rows (variables), papers are columns (observations).
struct DocTermMatrix {
  std::vector<std::string> keywords;
  std::vector<std::string> papers;
  DenseMatrix<std::uint8_t> cells;

  std::size_t row_sum(std::size_t r) const {
    std::size_t s = 0;
    for (std::size_t c = 0; c < cells.cols(); ++c) s += cells(r, c);
    return s;
  }

  // Builds a matrix directly from 0/1 rows; used by tests and tools.
  static DocTermMatrix from_rows(std::vector<std::string> keywords, std::vector<std::string> papers,
                                 const std::vector<std::vector<int>>& rows) {
    if (rows.size() != keywords.size()) throw Error("row count does not match keyword count");
    DocTermMatrix m{std::move(keywords), std::move(papers), {}};
    m.cells = DenseMatrix<std::uint8_t>(rows.size(), m.papers.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.papers.size()) throw Error("row length does not match paper count");
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        if (rows[r][c] != 0 && rows[r][c] != 1) throw Error("cells must be 0 or 1");
        m.cells(r, c) = static_cast<std::uint8_t>(rows[r][c]);
      }
    }
    return m;
  }
};

struct CooccurrenceMatrix {
  std::vector<std::string> keywords;
  DenseMatrix<std::int64_t> counts;
};

struct CorrelationMatrix {
  std::vector<std::string> keywords;
  DenseMatrix<double> values;
  std::vector<std::size_t> constant_rows;  // rows with zero variance, correlations set to 0

  std::size_t size() const noexcept { return keywords.size(); }
};

// Drops `excluded` keywords, then keywords present on fewer than
// `min_occurrence` papers, then papers left with nothing. Keywords are
// ordered lexicographically and papers by id.
inline DocTermMatrix build_doc_term_matrix(const Corpus& c, std::size_t min_occurrence,
                                           const std::set<std::string>& excluded) {
  const auto freq = frequency_table(c);
  std::vector<std::string> keywords;
  for (const auto& e : freq.entries())
    if (!excluded.count(e.keyword) && e.count >= min_occurrence && e.count > 0) keywords.push_back(e.keyword);
  std::sort(keywords.begin(), keywords.end());
  if (keywords.size() < 2) {
    throw Error("degenerate matrix: " + std::to_string(keywords.size()) + " keyword(s) left after filtering");
  }
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < keywords.size(); ++i) row_of.emplace(keywords[i], i);

  std::vector<const Paper*> papers;
  for (const auto& p : c.papers()) {
    if (std::any_of(p.keywords.begin(), p.keywords.end(), [&](const std::string& k) { return row_of.count(k) > 0; }))
      papers.push_back(&p);
  }
  std::sort(papers.begin(), papers.end(), [](const Paper* a, const Paper* b) { return a->id < b->id; });

  DocTermMatrix m;
  m.keywords = std::move(keywords);
  m.cells = DenseMatrix<std::uint8_t>(m.keywords.size(), papers.size());
  for (std::size_t col = 0; col < papers.size(); ++col) {
    m.papers.push_back(papers[col]->id);
    for (const auto& k : papers[col]->keywords) {
      auto it = row_of.find(k);
      if (it != row_of.end()) m.cells(it->second, col) = 1;
    }
  }
  return m;
}

inline CooccurrenceMatrix cooccurrence(const DocTermMatrix& m) {
  const std::size_t n = m.keywords.size();
  const std::size_t cols = m.cells.cols();
  CooccurrenceMatrix out{m.keywords, DenseMatrix<std::int64_t>(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::int64_t both = 0;
      for (std::size_t c = 0; c < cols; ++c) both += m.cells(i, c) & m.cells(j, c);
      out.counts(i, j) = both;
      out.counts(j, i) = both;
    }
  }
  return out;
}

// Pearson correlation of binary rows. With P papers, row sums s_i and
// co-occurrence c_ij the coefficient reduces to
//   (P c_ij - s_i s_j) / sqrt(s_i (P - s_i) s_j (P - s_j)),
// evaluated with exact integer numerator and denominator factors.
inline CorrelationMatrix correlation(const DocTermMatrix& m) {
  const std::size_t n = m.keywords.size();
  const auto cooc = cooccurrence(m);
  const auto papers = static_cast<std::int64_t>(m.cells.cols());
  CorrelationMatrix out{m.keywords, DenseMatrix<double>(n, n), {}};

  std::vector<std::int64_t> spread(n);  // s (P - s), zero for constant rows
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t s = cooc.counts(i, i);
    spread[i] = s * (papers - s);
    if (spread[i] == 0) out.constant_rows.push_back(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.values(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double r = 0.0;
      if (spread[i] != 0 && spread[j] != 0) {
        const std::int64_t num = papers * cooc.counts(i, j) - cooc.counts(i, i) * cooc.counts(j, j);
        r = static_cast<double>(num) /
            std::sqrt(static_cast<double>(spread[i]) * static_cast<double>(spread[j]));
        r = std::clamp(r, -1.0, 1.0);
      }
      out.values(i, j) = r;
      out.values(j, i) = r;
    }
  }
  return out;
}

inline nlohmann::json doc_term_to_json(const DocTermMatrix& m) {
  std::vector<int> cells(m.cells.data().begin(), m.cells.data().end());
  return {{"keywords", m.keywords}, {"papers", m.papers}, {"cells", cells}};
}

inline nlohmann::json correlation_to_json(const CorrelationMatrix& m) {
  return {{"keywords", m.keywords}, {"values", m.values.data()}, {"constant_rows", m.constant_rows}};
}

inline CorrelationMatrix correlation_from_json(const nlohmann::json& j) {
  CorrelationMatrix m;
  m.keywords = j.at("keywords").get<std::vector<std::string>>();
  const auto values = j.at("values").get<std::vector<double>>();
  const std::size_t n = m.keywords.size();
  if (values.size() != n * n) throw Error("correlation matrix has " + std::to_string(values.size()) + " cells, expected " + std::to_string(n * n));
  m.values = DenseMatrix<double>(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) m.values(i, k) = values[i * n + k];
  m.constant_rows = j.value("constant_rows", std::vector<std::size_t>{});
  return m;
}

inline nlohmann::json cooccurrence_to_json(const CooccurrenceMatrix& m) {
  return {{"keywords", m.keywords}, {"counts", m.counts.data()}};
}

inline CooccurrenceMatrix cooccurrence_from_json(const nlohmann::json& j) {
  CooccurrenceMatrix m;
  m.keywords = j.at("keywords").get<std::vector<std::string>>();
  const auto counts = j.at("counts").get<std::vector<std::int64_t>>();
  const std::size_t n = m.keywords.size();
  if (counts.size() != n * n) throw Error("co-occurrence matrix has wrong cell count");
  m.counts = DenseMatrix<std::int64_t>(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) m.counts(i, k) = counts[i * n + k];
  return m;
}

}  // namespace coword
