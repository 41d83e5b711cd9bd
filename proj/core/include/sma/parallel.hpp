#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace sma {

// Static block partition of [0, count) over `threads` workers. Each index is
// processed exactly once; results must go to per-index slots, which keeps
// outcomes independent of the thread count.
inline void parallel_for(long count, int threads, const std::function<void(long)>& body) {
    if (count <= 0) return;
    threads = std::max(1, std::min<long>(threads, count));
    if (threads == 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    long chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        long begin = t * chunk;
        long end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &body] {
            for (long i = begin; i < end; ++i) body(i);
        });
    }
    for (std::thread& worker : pool) worker.join();
}

}  // namespace sma
