#pragma once

#include <cstddef>
#include <functional>

namespace rcd {

// Thread cap: RC_THREADS if set, otherwise hardware concurrency.
int max_threads();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker, so each index runs exactly once and writers to index-addressed
// slots need no locking. Results must not depend on which thread runs an
// index; nested calls degrade to serial execution, so the output is
// identical for any RC_THREADS value.
//
// Exceptions thrown by fn are captured and the first one (lowest index) is
// rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rcd
