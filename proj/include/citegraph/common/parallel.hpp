#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace citegraph {

inline int default_workers() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(begin, end) over contiguous chunks of [0, n). Callers are
// responsible for making the result independent of the chunking (disjoint
// output slices, or merges that are associative and commutative).
inline void parallel_chunks(size_t n, int workers,
                            const std::function<void(size_t, size_t)>& fn) {
    if (n == 0) return;
    if (workers < 1) workers = 1;
    size_t w = std::min<size_t>(static_cast<size_t>(workers), n);
    if (w <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(w);
    size_t chunk = (n + w - 1) / w;
    for (size_t t = 0; t < w; ++t) {
        size_t b = t * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        threads.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : threads) th.join();
}

}  // namespace citegraph
