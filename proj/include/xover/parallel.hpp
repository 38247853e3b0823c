#ifndef XOVER_PARALLEL_HPP
#define XOVER_PARALLEL_HPP

// Minimal deterministic work distribution. XOVER_THREADS caps the worker
// count (0 or unset means hardware concurrency). Results must be written to
// per-index slots so the outcome is identical for any worker count.

#include <cstddef>
#include <functional>

namespace xover {

int worker_count();

// Calls fn(i) for every i in [0, count), distributing indices over workers.
// fn must only write to state owned by index i.
void parallel_indexed(std::size_t count, int workers,
                      const std::function<void(std::size_t)>& fn);

} // namespace xover

#endif
