#pragma once

#include <cstddef>
#include <functional>

namespace neutro {

// Number of worker threads: NEUTRO_THREADS when set to a positive integer,
// otherwise the hardware concurrency (at least 1).
std::size_t thread_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Every index is
// processed exactly once; callers only write to per-index outputs, so results
// do not depend on the number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace neutro
