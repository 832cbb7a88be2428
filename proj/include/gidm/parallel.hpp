#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

#include "gidm/types.hpp"

namespace gidm {

inline unsigned worker_count() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

/// Runs fn(begin, end) over a chunked partition of [0, n). Each chunk is
/// processed by exactly one worker, so writes to disjoint output slots need
/// no synchronization. Falls back to a serial call for small n.
inline void parallel_for_chunks(Index n,
                                const std::function<void(Index, Index)>& fn,
                                Index min_chunk = 64) {
  if (n <= 0) return;
  unsigned workers = worker_count();
  if (workers <= 1 || n <= min_chunk) {
    fn(0, n);
    return;
  }
  Index chunks = std::min<Index>(workers, (n + min_chunk - 1) / min_chunk);
  Index step = (n + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunks));
  for (Index c = 0; c < chunks; ++c) {
    Index b = c * step;
    Index e = std::min<Index>(n, b + step);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

inline void parallel_for(Index n, const std::function<void(Index)>& fn,
                         Index min_chunk = 64) {
  parallel_for_chunks(
      n,
      [&fn](Index b, Index e) {
        for (Index i = b; i < e; ++i) fn(i);
      },
      min_chunk);
}

}  // namespace gidm
