#pragma once

// Rank-frequency power-law fits and per-keyword linear trends.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coword/corpus.hpp"
#include "coword/stats.hpp"
#include "coword/util.hpp"

namespace coword {

struct PowerLawFit {
  double alpha = 0.0;
  double r_squared = 0.0;
  double intercept = 0.0;  // log-space
  std::size_t n_points = 0;
  bool degenerate = false;  // response had zero variance; r_squared reported as 0
};

struct RankCount {
  double rank = 0.0;
  double count = 0.0;
};

// Least squares of log(count) on log(rank); alpha is the negated slope.
// Points with count < 1 or rank < 1 are ignored.
inline PowerLawFit powerlaw_fit(std::span<const RankCount> points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (p.rank < 1.0 || p.count < 1.0) continue;
    x.push_back(std::log(p.rank));
    y.push_back(std::log(p.count));
  }
  if (x.size() < 3) throw Error("power-law fit needs at least 3 points with count >= 1");
  const auto fit = stats::ols(x, y);
  PowerLawFit out;
  out.alpha = fit.slope == 0.0 ? 0.0 : -fit.slope;
  out.intercept = fit.intercept;
  out.n_points = x.size();
  out.degenerate = fit.syy == 0.0;
  out.r_squared = out.degenerate ? 0.0 : std::clamp(fit.r_squared, 0.0, 1.0);
  return out;
}

inline PowerLawFit powerlaw_fit(const FrequencyTable& table) {
  std::vector<RankCount> points;
  for (const auto& e : table.entries())
    points.push_back({static_cast<double>(e.rank), static_cast<double>(e.count)});
  return powerlaw_fit(points);
}

// raw: papers per year carrying the keyword; share: that count divided by the
// number of papers published that year.
enum class TrendMode { raw, share };

struct YearCount {
  int year = 0;
  double count = 0.0;

  friend bool operator==(const YearCount&, const YearCount&) = default;
};

// One entry per year of `years`; missing years count as 0.
inline std::vector<YearCount> yearly_counts(const Corpus& c, std::string_view keyword, YearRange years,
                                            TrendMode mode = TrendMode::raw) {
  if (years.empty()) throw Error("year range is empty");
  std::vector<YearCount> out;
  std::vector<double> papers_per_year(years.size(), 0.0);
  for (int y = years.first; y <= years.last; ++y) out.push_back({y, 0.0});
  for (const auto& p : c.papers()) {
    if (!years.contains(p.year)) continue;
    const auto slot = static_cast<std::size_t>(p.year - years.first);
    papers_per_year[slot] += 1.0;
    if (p.has_keyword(keyword)) out[slot].count += 1.0;
  }
  if (mode == TrendMode::share) {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i].count = papers_per_year[i] > 0.0 ? out[i].count / papers_per_year[i] : 0.0;
  }
  return out;
}

inline constexpr double kSignificanceLevel = 0.05;

struct TrendFit {
  std::string keyword;
  std::size_t total_count = 0;
  double slope = 0.0;
  double std_error = 0.0;
  double p_value = 1.0;
  YearRange years;
  bool significant = false;
};

// OLS of count on year with a two-sided t-test on the slope (df = n - 2).
// A fit with no residual variance reports stderr 0 and p 0, unless the slope
// is also 0 (constant series), which reports p 1.
inline TrendFit linear_trend(std::span<const YearCount> series) {
  if (series.size() < 3) throw Error("trend fit needs at least 3 points");
  std::vector<double> x, y;
  double total = 0.0;
  for (const auto& p : series) {
    x.push_back(p.year);
    y.push_back(p.count);
    total += p.count;
  }
  const auto fit = stats::ols(x, y);
  TrendFit out;
  out.slope = fit.slope;
  out.total_count = static_cast<std::size_t>(std::llround(total));
  out.years = {series.front().year, series.back().year};
  const bool exact = fit.sse == 0.0 || fit.sse <= 1e-20 * fit.syy;
  if (exact) {
    out.slope = fit.syy == 0.0 ? 0.0 : fit.slope;
    out.std_error = 0.0;
    out.p_value = out.slope == 0.0 ? 1.0 : 0.0;
  } else {
    out.std_error = fit.slope_stderr;
    out.p_value = stats::t_two_sided_p(fit.slope / fit.slope_stderr, static_cast<double>(series.size() - 2));
  }
  out.significant = out.p_value < kSignificanceLevel;
  return out;
}

// Fits the `top_n` most frequent keywords and orders them by slope,
// steepest rise first; equal slopes fall back to keyword order.
inline std::vector<TrendFit> rank_trends(const Corpus& c, std::size_t top_n, YearRange years,
                                         TrendMode mode = TrendMode::raw) {
  if (top_n < 1) throw Error("top_n must be at least 1");
  const auto table = frequency_table(filter_corpus(c, c.venues(), years));
  std::vector<TrendFit> fits;
  for (const auto& e : table.entries()) {
    if (fits.size() == top_n) break;
    const auto series = yearly_counts(c, e.keyword, years, mode);
    auto fit = linear_trend(series);
    fit.keyword = e.keyword;
    fit.total_count = e.count;
    fits.push_back(std::move(fit));
  }
  std::stable_sort(fits.begin(), fits.end(), [](const TrendFit& a, const TrendFit& b) {
    if (a.slope != b.slope) return a.slope > b.slope;
    return a.keyword < b.keyword;
  });
  return fits;
}

inline nlohmann::json trend_to_json(const TrendFit& t) {
  return {{"keyword", t.keyword},   {"total", t.total_count}, {"slope", t.slope},
          {"stderr", t.std_error},  {"p", t.p_value},         {"significant", t.significant},
          {"years", {t.years.first, t.years.last}}};
}

inline TrendFit trend_from_json(const nlohmann::json& j) {
  TrendFit t;
  t.keyword = j.at("keyword").get<std::string>();
  t.total_count = j.at("total").get<std::size_t>();
  t.slope = j.at("slope").get<double>();
  t.std_error = j.at("stderr").get<double>();
  t.p_value = j.at("p").get<double>();
  t.significant = j.at("significant").get<bool>();
  const auto years = j.at("years").get<std::vector<int>>();
  t.years = {years.at(0), years.at(1)};
  return t;
}

inline std::string trends_to_csv(const std::vector<TrendFit>& fits) {
  std::string out = "keyword,total,slope,stderr,p,significant\n";
  for (const auto& t : fits) {
    out += csv::join_line({t.keyword, std::to_string(t.total_count), format_fixed(t.slope), format_fixed(t.std_error),
                           format_fixed(t.p_value), t.significant ? "true" : "false"});
  }
  return out;
}

}  // namespace coword
