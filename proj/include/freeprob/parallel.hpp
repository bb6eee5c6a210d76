#pragma once

#include <cstddef>
#include <functional>

namespace freeprob {

/// Cap on worker threads used by grid sweeps (default: hardware
/// concurrency). Chunk boundaries are fixed, so results do not depend
/// on the thread count.
void set_max_threads(int n);
int max_threads();

namespace detail {

/// Run fn(begin, end) over fixed-size chunks of [0, n), possibly from
/// several threads. Exceptions from workers are rethrown in the caller.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace detail
} // namespace freeprob
