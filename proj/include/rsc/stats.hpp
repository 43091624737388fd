#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "rsc/errors.hpp"

namespace rsc::stats {

struct Estimate {
  double mean = 0;
  double half_width = 0;  // normal-approximation 95% half width
  std::size_t n = 0;

  double lo() const { return mean - half_width; }
  double hi() const { return mean + half_width; }
};

inline Estimate mean_ci(const std::vector<double>& xs) {
  Estimate e;
  e.n = xs.size();
  if (xs.empty()) return e;
  double s = 0;
  for (double x : xs) s += x;
  e.mean = s / static_cast<double>(e.n);
  if (e.n < 2) return e;
  double ss = 0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.half_width = 1.96 * std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  return e;
}

inline Estimate proportion_ci(std::uint64_t k, std::uint64_t n) {
  Estimate e;
  e.n = n;
  if (n == 0) return e;
  e.mean = static_cast<double>(k) / static_cast<double>(n);
  e.half_width = 1.96 * std::sqrt(e.mean * (1 - e.mean) / static_cast<double>(n));
  return e;
}

struct Regression {
  double slope = 0, intercept = 0;
  double slope_se = 0;
  double slope_lo = 0, slope_hi = 0;  // 95% t interval
};

/// Ordinary least squares y = a + b x with a t-based 95% interval for b.
inline Regression linear_regression(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw domain_error("regression needs at least 3 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw domain_error("regression needs at least two distinct x values");
  Regression r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - r.intercept - r.slope * x[i];
    rss += e * e;
  }
  r.slope_se = std::sqrt(rss / (n - 2) / sxx);
  const boost::math::students_t t(n - 2);
  const double q = boost::math::quantile(t, 0.975);
  r.slope_lo = r.slope - q * r.slope_se;
  r.slope_hi = r.slope + q * r.slope_se;
  return r;
}

/// Central acceptance region [lo, hi] for a Binomial(n, p) count at the given level.
inline std::pair<std::uint64_t, std::uint64_t> binomial_interval(std::uint64_t n, double p, double level = 0.99) {
  if (p <= 0) return {0, 0};
  if (p >= 1) return {n, n};
  const boost::math::binomial_distribution<double> b(static_cast<double>(n), p);
  const double a = (1 - level) / 2;
  // Smallest k with P(X <= k) >= a, and smallest k with P(X <= k) >= 1 - a.
  auto lower = [&](double q) {
    std::uint64_t lo = 0, hi = n;
    while (lo < hi) {
      const std::uint64_t mid = (lo + hi) / 2;
      if (boost::math::cdf(b, static_cast<double>(mid)) >= q)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  };
  return {lower(a), lower(1 - a)};
}

}  // namespace rsc::stats
