#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace propsim {

// Worker count used by every Monte-Carlo loop. Defaults to the hardware
// concurrency. Results never depend on this value.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Calls body(i) for i in [0, n) across thread_count() workers using static
// contiguous blocks. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// out[i] = fn(i), filled in parallel. Reductions over the result are the
// caller's, in index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace propsim
