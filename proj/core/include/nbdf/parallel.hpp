#pragma once

#include <cstddef>
#include <functional>

namespace nbdf {

/// Worker count used when a caller passes 0: hardware concurrency, at least 1.
unsigned default_threads();

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = default). Each
/// index runs exactly once; the first exception thrown is rethrown after all
/// workers have joined.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace nbdf
