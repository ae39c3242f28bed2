#pragma once

#include <complex>
#include <vector>

namespace osclab::detail {

// In-place unnormalized DFT of a d-dimensional M^d row-major complex array.
// sign = -1 applies exp(-i 2 pi k j / M) (analysis), sign = +1 the conjugate
// kernel (synthesis).  Plans are cached per (d, M, sign) in estimate mode and
// executed on plan-owned aligned buffers under a lock, so results are
// bit-stable across runs and callers regardless of input alignment.
void dft(int dimension, int modes_per_axis, int sign,
         std::vector<std::complex<double>>& data);

}  // namespace osclab::detail
