#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "coword/matrix.hpp"
#include "oracles.hpp"

using namespace coword;

namespace {

DocTermMatrix from(const std::vector<std::vector<int>>& rows) {
  std::vector<std::string> keywords, papers;
  for (std::size_t i = 0; i < rows.size(); ++i) keywords.push_back("k" + std::to_string(i));
  for (std::size_t j = 0; j < rows.front().size(); ++j) papers.push_back("p" + std::to_string(j));
  return DocTermMatrix::from_rows(keywords, papers, rows);
}

Corpus small_corpus() {
  return Corpus({Paper{"p1", "", "V", 2010, {"a", "b", "c"}}, Paper{"p2", "", "V", 2010, {"a", "b"}},
                 Paper{"p3", "", "V", 2011, {"a", "d"}}, Paper{"p4", "", "V", 2011, {"d", "e"}},
                 Paper{"p5", "", "V", 2012, {"e"}}, Paper{"p6", "", "V", 2012, {}}});
}

}  // namespace

TEST(DocTerm, ThresholdAndExclusions) {
  const auto m = build_doc_term_matrix(small_corpus(), 2, {});
  // counts: a3 b2 c1 d2 e2
  EXPECT_EQ(m.keywords, (std::vector<std::string>{"a", "b", "d", "e"}));
  EXPECT_EQ(m.papers, (std::vector<std::string>{"p1", "p2", "p3", "p4", "p5"}));
  const auto excl = build_doc_term_matrix(small_corpus(), 2, {"a"});
  EXPECT_EQ(excl.keywords, (std::vector<std::string>{"b", "d", "e"}));
  EXPECT_EQ(excl.papers.size(), 5u);  // p1 p2 keep b, p3 keeps d
}

TEST(DocTerm, ZeroThresholdKeepsEverything) {
  const auto m = build_doc_term_matrix(small_corpus(), 0, {});
  EXPECT_EQ(m.keywords.size(), 5u);
  EXPECT_EQ(m.cells(0, 0), 1);  // a on p1
  EXPECT_EQ(m.row_sum(0), 3u);
}

TEST(DocTerm, DegenerateIsAnError) {
  EXPECT_THROW(build_doc_term_matrix(small_corpus(), 3, {}), Error);
  EXPECT_THROW(build_doc_term_matrix(Corpus{}, 0, {}), Error);
}

TEST(Cooccurrence, HandCases) {
  const auto c = cooccurrence(from({{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 0}}));
  EXPECT_EQ(c.counts(0, 1), 2);
  EXPECT_EQ(c.counts(0, 2), 0);
  EXPECT_EQ(c.counts(2, 2), 1);
}

TEST(Cooccurrence, MatchesNestedLoop) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rows = oracle::random_binary(rng, 10, 8, 0.4);
    const auto c = cooccurrence(from(rows));
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j) {
        std::int64_t both = 0;
        for (std::size_t p = 0; p < 8; ++p) both += rows[i][p] && rows[j][p];
        EXPECT_EQ(c.counts(i, j), both);
      }
  }
}

TEST(Correlation, HandCases) {
  const auto r = correlation(from({{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 1, 1}}));
  EXPECT_DOUBLE_EQ(r.values(0, 1), 1.0);
  EXPECT_NEAR(r.values(0, 2), -0.57735026918962576, 1e-9);
  EXPECT_DOUBLE_EQ(r.values(0, 3), -1.0);
  EXPECT_TRUE(r.constant_rows.empty());
}

TEST(Correlation, ConstantRowsAreZeroAndFlagged) {
  const auto r = correlation(from({{1, 1, 1}, {1, 0, 1}, {0, 1, 0}}));
  EXPECT_EQ(r.constant_rows, (std::vector<std::size_t>{0}));
  EXPECT_EQ(r.values(0, 1), 0.0);
  EXPECT_EQ(r.values(0, 0), 1.0);
}

TEST(Correlation, PropertiesOnRandomFixtures) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> rows_d(2, 12), cols_d(2, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t nr = rows_d(rng), nc = cols_d(rng);
    const auto rows = oracle::random_binary(rng, nr, nc, 0.5);
    const auto m = from(rows);
    const auto r = correlation(m);
    for (std::size_t i = 0; i < nr; ++i) {
      EXPECT_EQ(r.values(i, i), 1.0);
      for (std::size_t j = 0; j < nr; ++j) {
        EXPECT_EQ(r.values(i, j), r.values(j, i));
        EXPECT_LE(std::abs(r.values(i, j)), 1.0);
        if (i != j) {
          EXPECT_NEAR(r.values(i, j), oracle::pearson(rows[i], rows[j]), 1e-12);
        }
      }
    }

    // column permutation: unchanged
    std::vector<std::size_t> perm(nc);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    auto shuffled = rows;
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) shuffled[i][j] = rows[i][perm[j]];
    EXPECT_EQ(correlation(from(shuffled)).values, r.values);

    // row permutation: equivariant
    std::vector<std::size_t> rp(nr);
    std::iota(rp.begin(), rp.end(), std::size_t{0});
    std::shuffle(rp.begin(), rp.end(), rng);
    std::vector<std::vector<int>> reordered;
    for (auto i : rp) reordered.push_back(rows[i]);
    const auto rr = correlation(from(reordered));
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nr; ++j) EXPECT_EQ(rr.values(i, j), r.values(rp[i], rp[j]));
  }
}

TEST(Correlation, JsonRoundTrip) {
  const auto r = correlation(from({{1, 1, 0}, {0, 1, 1}, {1, 1, 1}}));
  const auto back = correlation_from_json(nlohmann::json::parse(correlation_to_json(r).dump()));
  EXPECT_EQ(back.values, r.values);
  EXPECT_EQ(back.constant_rows, r.constant_rows);
  EXPECT_THROW(correlation_from_json({{"keywords", {"a"}}, {"values", {1.0, 2.0}}}), Error);
}

TEST(DocTerm, FromRowsValidates) {
  EXPECT_THROW(DocTermMatrix::from_rows({"a"}, {"p"}, {{2}}), Error);
  EXPECT_THROW(DocTermMatrix::from_rows({"a", "b"}, {"p"}, {{1}}), Error);
}
