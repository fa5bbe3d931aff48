#pragma once

#include <cstddef>
#include <functional>

namespace eitflash {

// Worker count resolution: requested > 0 wins, then EITFLASH_WORKERS, then
// hardware concurrency.
int resolve_workers(int requested = 0);

// Runs fn(i) for i in [0, n) across `workers` threads. Tasks must be
// independent; callers store results into index-addressed slots, so output
// ordering is deterministic regardless of scheduling. The first task
// failure is rethrown on the calling thread with the task index prefixed.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Contiguous-range variant for large grid fills: fn(begin, end).
void parallel_chunks(std::size_t n, int workers,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace eitflash
