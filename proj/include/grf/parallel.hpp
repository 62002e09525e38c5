#pragma once

#include <cstddef>
#include <functional>

namespace grf {

/// Worker count resolution: GRF_THREADS env var wins, then the value set via
/// set_thread_count (the CLI --threads flag), then hardware concurrency.
void set_thread_count(int threads);  // 0 = auto
int effective_threads();

/// Run fn over [0, count) split into contiguous chunks, one per worker.
/// Callers must ensure chunks touch disjoint state; results are then
/// independent of the worker count by construction.
void parallel_for(size_t count, const std::function<void(size_t begin, size_t end)>& fn);

} // namespace grf
