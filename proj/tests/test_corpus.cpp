#include <map>
#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "coword/corpus.hpp"

using namespace coword;

namespace {

const std::string kHeader = "id,title,venue,year,keywords\n";

Corpus parse(const std::string& body) { return parse_corpus(kHeader + body, CorpusFormat::delimited); }

Corpus fixture() { return read_corpus_file(std::string(COWORD_TEST_DATA) + "/fixture_corpus.csv"); }

std::string random_token(std::mt19937_64& rng, bool allow_separators) {
  static const std::string plain = "abcdefghij klmnopXYZ-_";
  static const std::string nasty = ",\"\n;";
  std::uniform_int_distribution<int> len(1, 8);
  std::string out;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    const bool special = allow_separators && std::uniform_int_distribution<int>(0, 5)(rng) == 0;
    const auto& pool = special ? nasty : plain;
    out.push_back(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]);
  }
  return out;
}

}  // namespace

TEST(ParseCorpus, QuotedKeywordCell) {
  const auto c = parse("p1,SomeTitle,InfoVis,2006,\"interaction;evaluation\"\n");
  ASSERT_EQ(c.size(), 1u);
  const auto& p = c.papers()[0];
  EXPECT_EQ(p.id, "p1");
  EXPECT_EQ(p.venue, "InfoVis");
  EXPECT_EQ(p.year, 2006);
  EXPECT_EQ(p.keywords, (std::vector<std::string>{"interaction", "evaluation"}));
  EXPECT_FALSE(p.flagged());
}

TEST(ParseCorpus, EmptyKeywordCellIsFlagged) {
  const auto c = parse("p1,T,VAST,2010,\n p2,T,VAST,2010,\" ; ;\"\n");
  EXPECT_TRUE(c.papers()[0].flagged());
  EXPECT_TRUE(c.papers()[1].flagged());
  EXPECT_EQ(c.flagged_count(), 2u);
}

TEST(ParseCorpus, KeywordsAreTrimmed) {
  const auto c = parse("p1,T,VAST,2010,\" a ;b  ;; c\"\n");
  EXPECT_EQ(c.papers()[0].keywords, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ParseCorpus, DuplicateIdNamesBothLines) {
  try {
    parse("p1,A,InfoVis,2006,x\np2,B,InfoVis,2006,y\np1,C,InfoVis,2007,z\n");
    FAIL() << "expected a duplicate-id error";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("p1"), std::string::npos) << msg;
  }
}

TEST(ParseCorpus, MalformedRowsNameTheLine) {
  auto line_of = [](const std::string& body) {
    try {
      parse(body);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("p1,A,InfoVis,2006,x\np2,B,InfoVis\n"), 3u);
  EXPECT_EQ(line_of("p1,A,InfoVis,20x6,x\n"), 2u);
  EXPECT_EQ(line_of("p1,A,InfoVis,1979,x\n"), 2u);
  EXPECT_EQ(line_of("p1,A,InfoVis,2101,x\n"), 2u);
  EXPECT_EQ(line_of(",A,InfoVis,2006,x\n"), 2u);
  EXPECT_EQ(line_of("p1,\"open,InfoVis,2006,x\n"), 2u);
}

TEST(ParseCorpus, RejectsWrongHeader) {
  EXPECT_THROW(parse_corpus("id,title,year,venue,keywords\n", CorpusFormat::delimited), ParseError);
  EXPECT_THROW(parse_corpus("", CorpusFormat::delimited), ParseError);
}

TEST(ParseCorpus, AcceptsCrlfAndBom) {
  const auto c = parse_corpus("\xEF\xBB\xBFid,title,venue,year,keywords\r\np1,T,InfoVis,2004,a;b\r\n",
                              CorpusFormat::delimited);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.papers()[0].keywords.back(), "b");
}

TEST(ParseCorpus, Records) {
  const auto c = parse_corpus(
      "{\"id\":\"p1\",\"title\":\"\",\"venue\":\"VAST\",\"year\":2009,\"keywords\":[\"a\",\" b \",\"\"]}\n\n"
      "{\"id\":\"p2\",\"title\":\"t\",\"venue\":\"VAST\",\"year\":2010,\"keywords\":[]}\n",
      CorpusFormat::records);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.papers()[0].keywords, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(c.papers()[1].flagged());
}

TEST(ParseCorpus, RecordErrors) {
  EXPECT_THROW(parse_corpus("{\"id\":\"p1\"}\n", CorpusFormat::records), ParseError);
  EXPECT_THROW(parse_corpus("not json\n", CorpusFormat::records), ParseError);
  EXPECT_THROW(parse_corpus("{\"id\":\"p1\",\"title\":\"\",\"venue\":\"V\",\"year\":\"2009\",\"keywords\":[]}\n",
                            CorpusFormat::records),
               ParseError);
}

TEST(Corpus, ConstructorValidates) {
  EXPECT_THROW(Corpus({Paper{"a", "", "V", 2000, {}}, Paper{"a", "", "V", 2001, {}}}), Error);
  EXPECT_THROW(Corpus({Paper{"a", "", "V", 1900, {}}}), Error);
}

TEST(Corpus, RoundTripBothFormats) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Paper> papers;
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      Paper p;
      p.id = "id" + std::to_string(i);
      p.title = random_token(rng, true);
      p.venue = random_token(rng, false);
      p.venue = std::string(trim(p.venue));
      if (p.venue.empty()) p.venue = "V";
      p.year = std::uniform_int_distribution<int>(1980, 2100)(rng);
      const int k = std::uniform_int_distribution<int>(0, 4)(rng);
      for (int j = 0; j < k; ++j) {
        auto kw = std::string(trim(random_token(rng, false)));
        if (!kw.empty()) p.keywords.push_back(kw);
      }
      papers.push_back(p);
    }
    const Corpus c(papers);
    for (auto fmt : {CorpusFormat::delimited, CorpusFormat::records}) {
      const auto again = parse_corpus(serialize_corpus(c, fmt), fmt);
      EXPECT_EQ(again, c) << "trial " << trial;
    }
  }
}

TEST(Filter, VenueAndYear) {
  const auto c = fixture();
  const auto infovis = filter_corpus(c, {"InfoVis"}, {2004, 2013});
  ASSERT_GT(infovis.size(), 0u);
  for (const auto& p : infovis.papers()) EXPECT_EQ(p.venue, "InfoVis");
  EXPECT_EQ(filter_corpus(c, {}, {2004, 2013}).size(), 0u);
  EXPECT_EQ(filter_corpus(c, c.venues(), {kMinYear, kMaxYear}), c);
  // 4 papers per year, 2008..2013 inclusive
  EXPECT_EQ(filter_corpus(c, c.venues(), {2008, 2013}).size(), 24u);
}

TEST(Filter, YearRangeParsing) {
  EXPECT_EQ(parse_year_range("2004-2013"), (YearRange{2004, 2013}));
  EXPECT_EQ(parse_year_range("2008"), (YearRange{2008, 2008}));
  EXPECT_THROW(parse_year_range("2013-2004"), Error);
  EXPECT_THROW(parse_year_range("abc"), Error);
}

TEST(Frequency, CountsPapersNotMentions) {
  const auto c = parse("a,,V,2000,x;y\nb,,V,2000,x;x\nc,,V,2000,x\nd,,V,2000,y\ne,,V,2000,z\n");
  const auto t = frequency_table(c);
  EXPECT_EQ(t.count_of("x"), 3u);
  EXPECT_EQ(t.count_of("y"), 2u);
  EXPECT_EQ(t.count_of("missing"), 0u);
  EXPECT_EQ(t.entries().front().keyword, "x");
  EXPECT_EQ(t.entries().front().rank, 1u);
}

TEST(Frequency, TiesBreakLexicographically) {
  const auto c = parse("a,,V,2000,zeta;alpha\nb,,V,2000,zeta;alpha\n");
  const auto t = frequency_table(c);
  EXPECT_EQ(t.find("alpha")->rank, 1u);
  EXPECT_EQ(t.find("zeta")->rank, 2u);
}

TEST(Frequency, MatchesNestedLoopCounter) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "g", "h"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Paper> papers;
    const int n = std::uniform_int_distribution<int>(1, 100)(rng);
    for (int i = 0; i < n; ++i) {
      Paper p{"p" + std::to_string(i), "", "V", 2000, {}};
      const int k = std::uniform_int_distribution<int>(0, 6)(rng);
      for (int j = 0; j < k; ++j) p.keywords.push_back(vocab[std::uniform_int_distribution<std::size_t>(0, 7)(rng)]);
      papers.push_back(p);
    }
    const Corpus c(papers);
    const auto t = frequency_table(c);
    std::size_t incidences = 0;
    for (const auto& kw : vocab) {
      std::size_t count = 0;
      for (const auto& p : c.papers()) {
        bool present = false;
        for (const auto& k : p.keywords) present = present || k == kw;
        count += present;
      }
      incidences += count;
      EXPECT_EQ(t.count_of(kw), count);
    }
    EXPECT_EQ(t.total(), incidences);
    for (std::size_t i = 1; i < t.size(); ++i) {
      EXPECT_GE(t.entries()[i - 1].count, t.entries()[i].count);
      EXPECT_EQ(t.entries()[i].rank, i + 1);
    }
  }
}

TEST(Digest, Fixture) {
  const auto d = digest(fixture());
  EXPECT_EQ(d.papers, 40u);
  EXPECT_EQ(d.papers_with_keywords, 38u);
}
