#pragma once

#include <cstddef>
#include <functional>

namespace advland {

/// Worker count: ADVLAND_THREADS when set to a positive integer (at most 256),
/// hardware concurrency otherwise.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous chunks; callers
/// write into per-index slots and reduce afterwards so results never depend on
/// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace advland
