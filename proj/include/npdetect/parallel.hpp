#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace npdetect {

/// Fixed work-unit size. Chunk boundaries never depend on the thread count, so
/// per-chunk partial results combined in chunk order are reproducible.
inline constexpr std::size_t kChunkSize = 1 << 13;

/// Number of worker threads; 0 selects std::thread::hardware_concurrency().
void set_worker_threads(unsigned threads) noexcept;
unsigned worker_threads() noexcept;

/// Calls body(chunk_index, begin, end) once per chunk of [0, count).
template <class Body>
void for_each_chunk(std::size_t count, Body&& body) {
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(worker_threads(), chunks));
  auto run = [&](std::size_t c) { body(c, c * kChunkSize, std::min(count, (c + 1) * kChunkSize)); };
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t c = next++; c < chunks; c = next++) run(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = chunks;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  for_each_chunk(count, [&](std::size_t, std::size_t begin, std::size_t end) { body(begin, end); });
}

inline std::size_t chunk_count(std::size_t count) { return (count + kChunkSize - 1) / kChunkSize; }

}  // namespace npdetect
