#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace framelab {

/// Worker count: FRAMELAB_THREADS when it is a positive integer, otherwise
/// the hardware concurrency (at least 1).
inline std::size_t thread_count() {
  if (const char* env = std::getenv("FRAMELAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) for i in [0, count), split into contiguous chunks across
/// threads. Results land by index, so the output never depends on scheduling.
/// The first exception thrown by any worker is rethrown.
template <typename R, typename Fn>
std::vector<R> parallel_map(std::size_t count, Fn&& fn) {
  std::vector<R> out(count);
  const std::size_t workers = std::min(thread_count(), std::max<std::size_t>(1, count / 64));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(count, (w + 1) * chunk); ++i) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace framelab
