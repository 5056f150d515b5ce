#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace divbar {

/**
 * @brief Runs fn(i) for i in [0, n) on up to `threads` workers, contiguous
 *        index blocks per worker.
 *
 * Each index is processed by exactly one worker regardless of the thread
 * count, so writers that target slot i of a preallocated buffer produce
 * identical results for any `threads` value. The first exception thrown by a
 * worker is rethrown on the caller.
 */
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n ? n : 1);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t w = 0; w < nt; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, w, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace divbar
