#include "eitflash/sweep.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "eitflash/errors.hpp"

namespace eitflash {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("EITFLASH_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

namespace {

struct FailureSlot {
  std::mutex mu;
  bool failed = false;
  std::size_t index = 0;
  std::string message;
};

void record_failure(FailureSlot& slot, std::size_t index, const char* what) {
  std::scoped_lock lock(slot.mu);
  if (!slot.failed) {
    slot.failed = true;
    slot.index = index;
    slot.message = what;
  }
}

}  // namespace

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const int count = std::min<std::size_t>(std::max(1, resolve_workers(workers)), n);
  if (count == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  FailureSlot failure;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::scoped_lock lock(failure.mu);
        if (failure.failed) return;
      }
      try {
        fn(i);
      } catch (const std::exception& e) {
        record_failure(failure, i, e.what());
        return;
      } catch (...) {
        record_failure(failure, i, "unknown exception");
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (int w = 0; w < count; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (failure.failed)
    throw NumericalError("task " + std::to_string(failure.index) + " failed: " + failure.message);
}

void parallel_chunks(std::size_t n, int workers,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t count = std::min<std::size_t>(std::max(1, resolve_workers(workers)), n);
  const std::size_t chunk = (n + count - 1) / count;
  parallel_for(count, int(count), [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin < end) fn(begin, end);
  });
}

}  // namespace eitflash
