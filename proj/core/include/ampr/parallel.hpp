#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ampr {

/// Worker count for a requested value; 0 means all available cores.
inline unsigned resolve_workers(unsigned requested) noexcept {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/**
 * Runs body(i) for i in [0, n) on up to `workers` threads. Indices are
 * handed out dynamically; callers that need thread-count independent
 * results must write into per-index slots. The exception raised at the
 * lowest index is rethrown after all workers join.
 */
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    const unsigned count = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
    if (count <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = n;

    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(count - 1);
        for (unsigned t = 0; t + 1 < count; ++t) pool.emplace_back(run);
        run();
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace ampr
