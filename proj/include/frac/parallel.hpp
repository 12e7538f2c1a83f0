#pragma once

#include <cstddef>
#include <functional>

namespace frac {

/// Runs fn(begin, end) over a contiguous partition of [0, n) on `jobs`
/// threads (0 = hardware concurrency). Chunks are fixed by n and jobs only,
/// and each index is touched by exactly one thread, so results that write
/// per-index slots are bitwise independent of scheduling.
void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t, std::size_t)>& fn);

unsigned resolve_jobs(unsigned jobs);

}  // namespace frac
