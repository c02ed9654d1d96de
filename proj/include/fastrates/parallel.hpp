#pragma once

// Deterministic index-space parallelism: results land in caller-owned slots,
// so the merge is order-independent by construction.

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace fastrates {

inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([=, &fn] {
            for (int i = t; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace fastrates
