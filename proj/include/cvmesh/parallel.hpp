#pragma once

#include <functional>

namespace cvmesh {

/// Worker count: CVMESH_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs fn(k) for k in [0, n). Work is split into contiguous blocks; callers
/// write results by index so the outcome does not depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace cvmesh
