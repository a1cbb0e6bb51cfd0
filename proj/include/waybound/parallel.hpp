/*
 * This code is part of Waybound.
 *
 * (C) Copyright Waybound Contributors 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 *
 * Any modifications or derivative works of this code must retain this
 * copyright notice, and modified files need to carry a notice indicating
 * that they have been altered from the originals.
 */

#ifndef WAYBOUND_PARALLEL_HPP
#define WAYBOUND_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace waybound {

/// Runs body(0), ..., body(n-1) on up to `threads` workers. Each index is
/// claimed exactly once; results must be written into per-index slots so the
/// outcome is identical to the serial run. The first exception thrown by any
/// worker is rethrown after all workers have stopped.
inline void parallel_for(long n, int threads, const std::function<void(long)>& body) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = static_cast<int>(std::min<long>(threads, n));
  std::atomic<long> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const long i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace waybound

#endif  // WAYBOUND_PARALLEL_HPP
