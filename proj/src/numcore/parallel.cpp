#include "cae/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace cae::num {

namespace {

std::size_t initial_threads() noexcept {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CAE_THREADS"); env != nullptr) {
    try {
      const long v = std::stol(env);
      if (v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    } catch (...) {
      // unparsable value: keep the hardware default
    }
  }
  return n;
}

std::atomic<std::size_t>& thread_cap() noexcept {
  static std::atomic<std::size_t> cap{initial_threads()};
  return cap;
}

}  // namespace

std::size_t max_threads() noexcept { return thread_cap().load(std::memory_order_relaxed); }

void set_max_threads(std::size_t n) noexcept { thread_cap().store(std::max<std::size_t>(1, n)); }

void parallel_for(std::size_t count, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  min_chunk = std::max<std::size_t>(1, min_chunk);
  const std::size_t workers = std::min(max_threads(), (count + min_chunk - 1) / min_chunk);
  if (workers <= 1) {
    body(0, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(0, std::min(count, chunk));
}

}  // namespace cae::num
