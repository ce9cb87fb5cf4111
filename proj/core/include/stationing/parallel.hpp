#pragma once

#include <cstddef>
#include <functional>

namespace stationing {

// Runs fn(0) .. fn(n-1) on up to `workers` threads. Indices are claimed in
// order; the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace stationing
