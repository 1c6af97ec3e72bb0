#pragma once

#include <cstdint>
#include <functional>

namespace schedlaw {

// Worker cap: SCHEDLAW_THREADS when set (>= 1), else hardware concurrency.
int thread_budget();

// Runs fn(i) for i in [0, n). Each i must touch disjoint state so results
// cannot depend on execution order.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace schedlaw
