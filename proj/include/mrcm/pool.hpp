// SPDX-FileCopyrightText: 2026 mrcmflow authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace mrcm {

/// Contiguous block of task ids handled by worker `w` out of `workers`;
/// the remainder is spread round-robin over the leading workers.
inline std::pair<int, int> workerBlock(int ntasks, int workers, int w) {
  const int q = ntasks / workers;
  const int r = ntasks % workers;
  const int begin = w * q + std::min(w, r);
  return {begin, begin + q + (w < r ? 1 : 0)};
}

/// Static worker pool over independent tasks. Every task writes to its own
/// slot, so results are identical for any worker count.
class WorkerPool {
 public:
  explicit WorkerPool(int workers)
      : workers_(workers > 0 ? workers
                             : std::max(1u, std::thread::hardware_concurrency())) {}

  int workers() const { return workers_; }

  template <typename F>
  void parallelFor(int ntasks, F&& fn) const {
    if (ntasks <= 0) return;
    const int nw = std::min(workers_, ntasks);
    if (nw <= 1) {
      for (int t = 0; t < ntasks; ++t) fn(t);
      return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(nw);
    for (int w = 0; w < nw; ++w) {
      threads.emplace_back([&, w]() {
        auto [begin, end] = workerBlock(ntasks, nw, w);
        try {
          for (int t = begin; t < end; ++t) fn(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

 private:
  int workers_;
};

}  // namespace mrcm
