#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace osclab::detail {

// Median with the even-count mean-of-middles convention.
inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Interquartile range with nearest-rank quartiles.
inline double iqr_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n1 = static_cast<double>(v.size() - 1);
  const double q1 = v[static_cast<std::size_t>(std::llround(0.25 * n1))];
  const double q3 = v[static_cast<std::size_t>(std::llround(0.75 * n1))];
  return q3 - q1;
}

}  // namespace osclab::detail
