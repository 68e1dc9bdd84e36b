#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace fermiscale {

namespace detail {
inline std::atomic<int>& thread_limit() {
    static std::atomic<int> limit{0};   // 0 = use hardware concurrency
    return limit;
}
}

inline void set_max_threads(int n) { detail::thread_limit().store(n < 0 ? 0 : n); }

inline int max_threads() {
    int n = detail::thread_limit().load();
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, n);
}

/// Runs fn(i) for i in [0, n) on up to max_threads() workers.
/// Each index is processed exactly once and writes only its own output slot,
/// so results do not depend on the thread count; callers reduce the per-index
/// results in a fixed order afterwards.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min(max_threads(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace fermiscale
