#pragma once

#include <cstddef>
#include <functional>

namespace crd {

/// Number of worker threads used when a caller passes threads = 0.
unsigned default_thread_count() noexcept;

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default_thread_count()).
///
/// Indices are handed out dynamically; callers write results into slot i so the outcome
/// does not depend on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace crd
