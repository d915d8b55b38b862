#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace homsum {

/// 0 means "use HOMSUM_WORKERS if set, else 1".
inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HOMSUM_WORKERS")) {
    const long value = std::strtol(env, nullptr, 10);
    if (value > 0) return static_cast<unsigned>(value);
  }
  return 1;
}

/// Runs fn(begin, end) over fixed-size chunks of [0, count). Chunk boundaries
/// depend only on count and chunk_size, never on the worker count, so any
/// per-chunk computation is bit-identical regardless of how chunks are
/// scheduled. The first exception thrown by a worker is rethrown.
template <class Fn>
void parallel_chunks(std::size_t count, std::size_t chunk_size, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const std::size_t chunks = (count + chunk_size - 1) / chunk_size;
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(resolve_workers(workers), 1u), chunks));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t chunk = next.fetch_add(1);
      if (chunk >= chunks) return;
      const std::size_t begin = chunk * chunk_size;
      const std::size_t end = std::min(count, begin + chunk_size);
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace homsum
