#ifndef WPSIM_THREAD_POOL_HPP
#define WPSIM_THREAD_POOL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace wpsim {

// Index-based work pool. Tasks are addressed by index and must write their
// results into index-addressed slots, so output never depends on scheduling
// or on the worker count.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned workers = std::thread::hardware_concurrency())
      : workers_(workers == 0 ? 1 : workers) {}

  unsigned worker_count() const { return workers_; }

  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) const {
    if (n == 0) return;
    if (workers_ == 1 || n == 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> threads;
    const unsigned spawn = static_cast<unsigned>(
        std::min<std::size_t>(workers_, n));
    threads.reserve(spawn);
    for (unsigned w = 0; w < spawn; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

 private:
  unsigned workers_;
};

}  // namespace wpsim

#endif  // WPSIM_THREAD_POOL_HPP
