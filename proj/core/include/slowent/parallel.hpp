#pragma once

#include <cstddef>
#include <functional>

namespace slowent {

/// Worker count: SLOWENT_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count). Work is split into contiguous chunks;
/// callers write results into per-index slots and reduce afterwards in index
/// order, so output never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace slowent
