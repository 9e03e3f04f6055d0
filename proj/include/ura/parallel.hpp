#ifndef URA_PARALLEL_HPP
#define URA_PARALLEL_HPP

#include <functional>

namespace ura {

// Worker count for frame-level parallelism. Reads URADEC_WORKERS when set,
// otherwise hardware concurrency. Always >= 1.
int worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks across
// workers; fn must only write to per-index slots so results are gathered in
// index order regardless of completion order. Exceptions from workers are
// rethrown on the calling thread (first one wins).
void parallel_for(int n, const std::function<void(int)>& fn, int workers = 0);

} // namespace ura

#endif
