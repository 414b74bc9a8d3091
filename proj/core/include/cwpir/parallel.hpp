#pragma once

#include <cstddef>
#include <functional>

namespace cwpir {

/// Worker cap: CWPIR_THREADS environment variable when set, otherwise
/// hardware concurrency.
std::size_t worker_threads();

/// Runs fn(i) for i in [0, count) across worker threads. Falls back to
/// the calling thread for small counts or a cap of 1. Exceptions from
/// workers are rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace cwpir
