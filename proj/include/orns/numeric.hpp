// Small numeric helpers shared across modules.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace orns {

/// Pairwise (tree) sum of term(i) for i in [begin, end). The split points
/// depend only on the range, so the result is reproducible bit for bit.
template <class T, class F>
T pairwise_sum(std::size_t begin, std::size_t end, const F& term) {
  const std::size_t n = end - begin;
  if (n <= 16) {
    T acc{};
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + n / 2;
  return pairwise_sum<T>(begin, mid, term) + pairwise_sum<T>(mid, end, term);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Resolves a requested thread count: 0 means ORNS_THREADS, then hardware.
unsigned resolve_threads(unsigned requested);

/// Runs body(task) for every task in [0, n_tasks) on up to `threads` workers.
/// Tasks are handed out dynamically; callers keep results reproducible by
/// writing each task's output to its own slot.
template <class F>
void parallel_tasks(std::size_t n_tasks, unsigned threads, const F& body) {
  threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n_tasks));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n_tasks; i = next++) body(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = n_tasks;
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace orns
