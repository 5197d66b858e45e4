#pragma once

#include <cstddef>
#include <functional>

namespace levykernel {

/// Worker count: LEVYKERNEL_THREADS if set, else the hardware concurrency.
int thread_count();

/// Calls body(i) for i in [0, n) on up to thread_count() threads. Each index
/// is handled exactly once; results written per index are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace levykernel
