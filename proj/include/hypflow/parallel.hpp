#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hypflow {

// Applies f to every item on at most `workers` threads (0: hardware concurrency).
// Results keep the input order; the first exception thrown is rethrown.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, F&& f, int workers = 0) {
  using R = decltype(f(items.front()));
  std::vector<R> out(items.size());
  if (items.empty()) return out;
  int nw = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nw = std::min<int>(nw, static_cast<int>(items.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        out[i] = f(items[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    }
  };
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nw; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace hypflow
