#pragma once

#include <cstddef>
#include <functional>

namespace entrokit {

/// Worker count: ENTROKIT_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls body(i) for i in [0, count) across worker_count() threads. Each index
/// runs exactly once; results must go to per-index slots so the outcome does
/// not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace entrokit
