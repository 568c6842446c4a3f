#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hamsim {

/// Worker count: HAMSIM_THREADS if set (>= 1), else hardware concurrency
/// capped at 16.  Read once per process.
inline unsigned workerCount() {
  static const unsigned count = [] {
    if (const char* env = std::getenv("HAMSIM_THREADS")) {
      char* end = nullptr;
      const unsigned long v = std::strtoul(env, &end, 10);
      if (end != env && *end == '\0' && v >= 1)
        return static_cast<unsigned>(std::min<unsigned long>(v, 256));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::min(hw == 0 ? 1u : hw, 16u);
  }();
  return count;
}

/// Runs f(blockIndex, begin, end) once per fixed-size block of [0, count).
/// Block boundaries depend only on blockSize — never on the worker count —
/// so callers that reduce per-block partial results in block order get
/// results independent of scheduling and HAMSIM_THREADS.
template <class F>
void parallelForBlocks(std::uint64_t count, std::uint64_t blockSize, F&& f) {
  if (count == 0) return;
  if (blockSize == 0) blockSize = 1;
  const std::uint64_t blocks = (count + blockSize - 1) / blockSize;
  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workerCount(), blocks));
  auto runBlock = [&](std::uint64_t b) {
    const std::uint64_t begin = b * blockSize;
    const std::uint64_t end = std::min(count, begin + blockSize);
    f(b, begin, end);
  };
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) runBlock(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr firstError;
  std::mutex errorMutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= blocks) return;
      try {
        runBlock(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(errorMutex);
        if (!firstError) firstError = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (firstError) std::rethrow_exception(firstError);
}

}  // namespace hamsim
