#pragma once

#include <cstddef>
#include <functional>

namespace brine {

/// Thread cap from the BRINE_THREADS environment variable, falling back to
/// the hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once; callers write results into slot i, so output order
/// never depends on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace brine
