#pragma once

#include <cstddef>
#include <functional>

namespace qnls {

// Worker count for parallel loops. Defaults to QNLS_THREADS when set, otherwise 1.
int thread_count();
void set_thread_count(int n);

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker; callers
// write into per-index slots so results never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qnls
