#pragma once

#include <cstdint>
#include <functional>

namespace mfe {

// Worker-count resolution: an explicit request > 0 wins, otherwise the
// MFE_WORKERS environment variable, otherwise 1.
int resolve_workers(int requested);

// Runs body(0), ..., body(count-1) across `workers` threads pulling from a
// shared counter. Results must be written to disjoint, preallocated slots so
// aggregation is independent of scheduling. If bodies throw, the exception
// for the lowest index is rethrown on the calling thread.
void parallel_for(std::int64_t count, int workers,
                  const std::function<void(std::int64_t)>& body);

} // namespace mfe
