#pragma once

// Chunked worker pool. Work is split into fixed chunks independent of the
// thread count and results are combined in chunk order, so every reduction
// is identical under any schedule.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace egsolve {

/// Worker count: hardware concurrency, capped by EG_SOLVE_THREADS when set.
inline std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EG_SOLVE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

/// Calls task(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers stop.
template <class Task>
void parallel_for(std::size_t n, Task&& task) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Maps [0, n) in fixed-size chunks: chunk c covers [c * chunk, min(n, (c + 1) * chunk)).
template <class Result, class ChunkFn>
std::vector<Result> map_chunks(std::size_t n, std::size_t chunk, ChunkFn&& fn) {
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<Result> out(chunks);
  parallel_for(chunks, [&](std::size_t c) { out[c] = fn(c * chunk, std::min(n, (c + 1) * chunk)); });
  return out;
}

}  // namespace egsolve
