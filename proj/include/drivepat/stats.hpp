#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "drivepat/errors.hpp"

namespace drivepat {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw degenerate_error("mean of empty collection");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double stddev(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

// Linear-interpolated percentile over an unsorted sample, pct in (0, 100].
// rank = pct/100 * (n-1), interpolated between the bracketing order
// statistics; pct = 100 returns the maximum.
inline double percentile(std::vector<double> xs, double pct) {
  if (xs.empty()) throw degenerate_error("percentile of empty collection");
  if (!(pct > 0.0 && pct <= 100.0)) throw config_error("percentile must lie in (0, 100]");
  std::sort(xs.begin(), xs.end());
  const double rank = pct / 100.0 * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= xs.size()) return xs.back();
  const double frac = rank - static_cast<double>(lo);
  return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

// Slope of the ordinary-least-squares line through (0, y[0]) .. (n-1, y[n-1]).
inline double ols_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) throw degenerate_error("ols_slope needs at least 2 points");
  const double xbar = 0.5 * static_cast<double>(n - 1);
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (static_cast<double>(i) - xbar) * y[i];
  }
  // sum_i (i - xbar)^2 = n (n^2 - 1) / 12
  const double den = static_cast<double>(n) *
                     (static_cast<double>(n) * static_cast<double>(n) - 1.0) / 12.0;
  return num / den;
}

}  // namespace drivepat
