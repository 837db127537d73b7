#pragma once

#include <cstddef>
#include <functional>

namespace hypokit {

/// Worker count used by parallel_for. Starts from HYPOKIT_THREADS when set,
/// otherwise 1.
int thread_count();
void set_thread_count(int threads);

/// Runs fn(i) for i in [0, n). Each index is visited exactly once; callers
/// write results into per-index slots so the outcome does not depend on the
/// schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hypokit
