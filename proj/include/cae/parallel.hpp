#pragma once

#include <cstddef>
#include <functional>

namespace cae::num {

// Upper bound on worker threads for internal row-parallel loops. Initialised
// from CAE_THREADS (default: hardware concurrency).
std::size_t max_threads() noexcept;
void set_max_threads(std::size_t n) noexcept;

// Runs body(begin, end) over a static contiguous partition of [0, count).
// Each index is owned by exactly one chunk, so results never depend on the
// thread count as long as body writes only to its own range.
void parallel_for(std::size_t count, std::size_t min_chunk,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace cae::num
