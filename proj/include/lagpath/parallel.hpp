#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace lagpath {

namespace detail {
inline int default_thread_count() {
  if (const char* env = std::getenv("LAGPATH_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}
inline std::atomic<int>& thread_count_ref() {
  static std::atomic<int> n{default_thread_count()};
  return n;
}
}  // namespace detail

inline int thread_count() { return detail::thread_count_ref().load(); }
inline void set_thread_count(int n) { detail::thread_count_ref().store(std::max(1, n)); }
inline int max_threads() { return static_cast<int>(std::max(1U, std::thread::hardware_concurrency())); }

// f(i) for i in [0, n), static contiguous chunks. Each index is handled by
// exactly one thread, so results never depend on the thread count as long as
// f(i) only writes slot i.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const auto threads = static_cast<std::size_t>(thread_count());
  if (threads <= 1 || n < 2 * threads || n < 32) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  auto run = [&](std::size_t t) {
    try {
      const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) f(i);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run, t);
  run(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Pairwise summation with a fixed tree shape determined only by the number of
// terms added; K values are summed side by side.
template <std::size_t K>
class TreeSum {
 public:
  void add(const std::array<double, K>& x) {
    std::array<double, K> carry = x;
    int level = 0;
    std::uint64_t c = count_;
    while (c & 1U) {
      for (std::size_t k = 0; k < K; ++k) carry[k] = partial_[static_cast<std::size_t>(level)][k] + carry[k];
      c >>= 1U;
      ++level;
    }
    partial_[static_cast<std::size_t>(level)] = carry;
    ++count_;
  }
  [[nodiscard]] std::array<double, K> value() const {
    std::array<double, K> s{};
    std::uint64_t c = count_;
    for (std::size_t level = 0; c != 0; ++level, c >>= 1U)
      if (c & 1U)
        for (std::size_t k = 0; k < K; ++k) s[k] += partial_[level][k];
    return s;
  }
  [[nodiscard]] std::uint64_t count() const { return count_; }

 private:
  std::array<std::array<double, K>, 64> partial_{};
  std::uint64_t count_ = 0;
};

}  // namespace lagpath
