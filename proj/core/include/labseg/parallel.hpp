#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace labseg {

// Runs fn(begin, end) over contiguous disjoint chunks of [0, n).
// Safe for deterministic output as long as fn writes only inside its own
// range and each element's result does not depend on the chunking; every
// reduction in this library stays sequential for that reason.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const std::size_t min_grain = 2048;
    int nt = std::max(1, threads);
    nt = int(std::min<std::size_t>(nt, (n + min_grain - 1) / min_grain));
    if (nt <= 1) {
        fn(std::size_t(0), n);
        return;
    }
    const std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const std::size_t begin = std::size_t(t) * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace labseg
