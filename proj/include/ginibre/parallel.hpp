#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ginibre {

/// Runs fn(0) ... fn(n-1) on up to hardware_concurrency threads. Each index
/// runs exactly once; callers write results by index, so the outcome does
/// not depend on scheduling. The exception from the lowest failing index is
/// rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned max_threads = 0) {
    if (n == 0) return;
    unsigned threads = max_threads == 0 ? std::thread::hardware_concurrency() : max_threads;
    threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, n));
    if (threads == 1) {
        for (std::size_t j = 0; j < n; ++j) fn(j);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_at = n;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= n) return;
            try {
                fn(j);
            } catch (...) {
                std::lock_guard lock(mu);
                if (j < failed_at) {
                    failed_at = j;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace ginibre
