#pragma once

#include <cstddef>
#include <functional>

namespace memkit {

/// Worker count: MEMKIT_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (0 or unset means auto). Read once per process.
std::size_t thread_count();

/// Splits [0, n) into at most thread_count() contiguous chunks and runs
/// body(begin, end) on each, blocking until all are done. The chunking
/// depends only on n and the thread count, and callers write disjoint
/// outputs per index, so results never depend on scheduling. The first
/// exception (lowest chunk) is rethrown.
///
/// Chunks smaller than min_chunk are merged; tiny loops run inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1);

}  // namespace memkit
