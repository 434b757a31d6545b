#pragma once

#include <cstddef>
#include <functional>

namespace qshap {

/// Worker count: QSHAP_THREADS if set (>=1), otherwise the hardware default.
int thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads with a
/// static block partition. Each index must write only to its own slots; no
/// ordering is guaranteed, so reductions happen afterwards on one thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qshap
