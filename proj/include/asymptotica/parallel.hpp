#pragma once

#include <cstddef>
#include <functional>

namespace asymptotica {

/// Worker count: ASYMPTOTICA_THREADS if set and positive, else the
/// hardware concurrency (at least 1).
std::size_t thread_limit();

/// Runs body(i) for i in [0, count) on up to thread_limit() threads.
/// The first exception thrown by any body is rethrown after all join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace asymptotica
