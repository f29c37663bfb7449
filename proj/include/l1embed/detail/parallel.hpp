#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace l1embed::detail {

// Calls body(begin, end) on disjoint contiguous chunks of [0, count), possibly
// from several threads. Results are deterministic as long as `body` writes
// only to its own index range.
template <class Body>
void parallel_for(std::size_t count, std::size_t min_chunk, Body&& body) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t chunks = std::min(hw, std::max<std::size_t>(1, count / std::max<std::size_t>(1, min_chunk)));
  if (chunks <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  const std::size_t step = (count + chunks - 1) / chunks;
  std::vector<std::jthread> workers;
  workers.reserve(chunks);
  for (std::size_t begin = 0; begin < count; begin += step) {
    const std::size_t end = std::min(count, begin + step);
    workers.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

}  // namespace l1embed::detail
