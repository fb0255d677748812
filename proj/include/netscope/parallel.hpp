#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace netscope {

/// Worker cap: NETSCOPE_THREADS when set, hardware concurrency otherwise.
inline unsigned worker_count() {
    if (const char* env = std::getenv("NETSCOPE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs fn(i) for i in [0, n). Work items must be independent; results
/// must be written to per-index slots so that the parallel schedule cannot
/// change them.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([=, &fn] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace netscope
