#pragma once

#include <cstddef>
#include <functional>

namespace scalelaw {

/// Worker count: SCALELAW_THREADS if set (>=1), else hardware
/// concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) across workers. Callers must make fn(i)
/// independent and write to disjoint slots so results do not depend on
/// the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace scalelaw
