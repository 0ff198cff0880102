#pragma once

#include <cstddef>
#include <functional>

namespace shdr {

/// Thread count from an explicit value (> 0), else SHDR_THREADS, else the
/// hardware concurrency.
int resolve_threads(int requested = 0);

/// Runs body(i) for i in [0, n) on up to `threads` workers pulling indices
/// from a shared counter. The first exception thrown by a body is rethrown
/// after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace shdr
