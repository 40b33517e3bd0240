#pragma once

// Ordinary least squares and the Student t distribution.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "coword/error.hpp"

namespace coword::stats {

namespace detail {

// Continued fraction for the incomplete beta function, evaluated with the
// modified Lentz method.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 1000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw Error("incomplete beta needs positive shape parameters");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// P(|T| >= |t|) for T ~ Student t with `df` degrees of freedom.
inline double t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

inline double t_cdf(double t, double df) {
  const double tail = 0.5 * t_two_sided_p(t, df);
  return t < 0.0 ? tail : 1.0 - tail;
}

// Median with the even-size convention of averaging the middle two; 0 for an
// empty sample.
inline double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  double sse = 0.0;  // residual sum of squares
  double sxx = 0.0;
  double syy = 0.0;
  std::size_t n = 0;
};

// Simple linear regression of y on x, centered for numerical stability.
inline OlsFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw Error("regression needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  OlsFit fit;
  fit.n = n;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    fit.sxx += dx * dx;
    fit.syy += dy * dy;
    sxy += dx * dy;
  }
  if (fit.sxx == 0.0) throw Error("regression needs at least two distinct x values");
  fit.slope = sxy / fit.sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (y[i] - my) - fit.slope * (x[i] - mx);
    fit.sse += r * r;
  }
  fit.r_squared = fit.syy > 0.0 ? 1.0 - fit.sse / fit.syy : 0.0;
  if (n > 2) fit.slope_stderr = std::sqrt(fit.sse / static_cast<double>(n - 2) / fit.sxx);
  return fit;
}

}  // namespace coword::stats
