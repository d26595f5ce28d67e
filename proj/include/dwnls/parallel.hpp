#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dwnls {

/// Runs fn(i) for i in [0, count) on `threads` workers. Results must be written by
/// index so the merge order never depends on scheduling. Returns one exception slot
/// per index (null on success).
template <class Fn>
std::vector<std::exception_ptr> parallel_for_index(std::size_t count, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (nthreads == 1) {
    worker();
    return errors;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return errors;
}

}  // namespace dwnls
