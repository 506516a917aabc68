#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace mvarch {

/// Runs fn(i) for i in [0, n), possibly on several threads. Work is split into
/// contiguous chunks; each index writes only to its own output slot, so results
/// do not depend on the thread count. The first exception (lowest index) is
/// rethrown after all workers join. n_threads = 0 picks hardware concurrency.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int n_threads = 0);

}  // namespace mvarch
