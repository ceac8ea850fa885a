#pragma once

#include <cstddef>
#include <functional>

namespace combmat {

/// Environment variable holding the worker count.
inline constexpr const char* kWorkersEnv = "COMBMAT_WORKERS";

/// COMBMAT_WORKERS if set to a positive integer, else the processor count.
int default_worker_count();

/// Run body(i) for i in [0, count) on up to `workers` threads (<= 0 means
/// default_worker_count()).  Indices are handed out dynamically; the first
/// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace combmat
