/// Deterministic fork-join map over an index range.
///
/// Workers pull indices from a shared atomic counter, so scheduling is
/// dynamic, but every result is stored at its own index: the output is a
/// pure function of the input regardless of thread interleaving. That is
/// the whole concurrency model of the toolkit — heavy per-sample work runs
/// in parallel, aggregation happens afterwards in index order.
#pragma once

#include "slocal/common.hpp"

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace slocal {

/// Number of workers to use when the caller does not say: the hardware
/// concurrency, with a floor of 1 (hardware_concurrency may report 0).
inline std::size_t default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<std::size_t>(hc);
}

/// Applies fn(i) for i in [0, n) with at most n_threads workers and returns
/// the results in index order. R must be default-constructible and movable.
/// The first exception thrown by any fn aborts the remaining work (already
/// running calls finish) and is rethrown here after all workers joined.
template <typename R, typename Fn>
std::vector<R> parallel_map(std::size_t n, std::size_t n_threads, Fn&& fn) {
  std::vector<R> results(n);
  if (n == 0) return results;
  if (n_threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      if (abort.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        abort.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  const std::size_t workers = std::min(n_threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace slocal
