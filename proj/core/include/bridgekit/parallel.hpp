#pragma once

#include <cstddef>
#include <functional>

namespace bridgekit {

/// Worker cap from BRIDGEKIT_THREADS (default: hardware concurrency, min 1).
unsigned thread_budget();

/// Runs body(i) for i in [0, n) on up to thread_budget() threads. Each index
/// runs exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bridgekit
