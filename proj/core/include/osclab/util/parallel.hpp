#pragma once

#include <cstddef>
#include <functional>

namespace osclab {

// Number of workers to use when the caller passes 0 (hardware concurrency,
// floored at 1).
int default_workers();

// Runs fn(i) for i in [0, n).  Indices are split into `workers` contiguous
// blocks assigned statically, so per-index outputs land in caller-owned slots
// and every result is independent of the worker count.  The first exception
// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace osclab
