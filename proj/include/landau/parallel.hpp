#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace landau {

namespace detail {
inline std::atomic<int>& thread_setting() {
    static std::atomic<int> n{1};
    return n;
}
} // namespace detail

inline void set_threads(int n) { detail::thread_setting() = std::max(1, n); }
inline int threads() { return detail::thread_setting(); }

// Splits [0, n) into contiguous chunks, one per worker. Work inside a chunk
// must not depend on chunk boundaries; reductions belong to the caller.
template <class F>
void parallel_for_range(std::size_t n, F&& fn) {
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads()), n);
    if (nt <= 1) {
        if (n) fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    const std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e] {
            try {
                fn(b, e);
            } catch (...) {
                std::lock_guard lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

template <class F>
void parallel_for(std::size_t n, F&& fn) {
    parallel_for_range(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

} // namespace landau
