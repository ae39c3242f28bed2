#pragma once

#include <cstddef>
#include <vector>

namespace osclab {

// Fixed-order pairwise summation: the reduction tree depends only on n,
// so results are bit-identical however the inputs were produced.
template <typename T>
T pairwise_sum(const T* x, std::size_t n) {
  if (n <= 8) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

template <typename T>
T pairwise_sum(const std::vector<T>& x) {
  return pairwise_sum(x.data(), x.size());
}

}  // namespace osclab
