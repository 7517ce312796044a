#pragma once

#include <cstddef>
#include <functional>

namespace qwalk {

/// Worker count used by parallel_for. Defaults to QWALK_WORKERS if set,
/// otherwise the hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t workers);

/// Calls body(i) for i in [0, count). Tasks are claimed dynamically; callers
/// write results into slot i so the outcome never depends on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qwalk
