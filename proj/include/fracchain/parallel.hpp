#pragma once
// Replica-level parallelism.  Thread count comes from FRACCHAIN_THREADS
// (falls back to the hardware concurrency).  Tasks are indexed and every
// result is written to its own slot, so merge order never depends on timing.

#include <cstddef>
#include <functional>

namespace fc {

int thread_count();

// Runs fn(i) for i in [0, n) on thread_count() workers.  The first exception
// thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fc
