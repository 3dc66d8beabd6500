#pragma once

#include <cstddef>
#include <functional>

namespace helitube {

/// Worker count: HELITUBE_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Each index
/// writes only its own result slot, so output does not depend on scheduling.
/// If several bodies throw, the exception of the lowest index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace helitube
