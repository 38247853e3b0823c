#include "xover/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace xover {

int worker_count() {
  int workers = 0;
  if (const char* env = std::getenv("XOVER_THREADS")) {
    try {
      workers = std::stoi(env);
    } catch (...) {
      workers = 0;
    }
  }
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  return workers > 0 ? workers : 1;
}

void parallel_indexed(std::size_t count, int workers,
                      const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(workers > 0 ? workers : 1),
                            count);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t w = 0; w < nthreads; ++w)
    pool.emplace_back([&] {
      try {
        for (std::size_t i = cursor.fetch_add(1);
             i < count && !failed.load(std::memory_order_relaxed);
             i = cursor.fetch_add(1))
          fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace xover
