#pragma once

#include <cstddef>
#include <functional>

namespace luba {

/// Worker count: hardware concurrency, capped by the LUBA_THREADS environment
/// variable when set. Always at least 1.
std::size_t thread_count();

/// Runs fn(i) for i in [0, n), splitting the range into contiguous blocks
/// across thread_count() workers. Falls back to a plain loop when only one
/// worker is available. fn must be safe to call concurrently for distinct i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace luba
