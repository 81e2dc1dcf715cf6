#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace docsource {

// Worker cap: DOCSOURCE_THREADS (0 or unset/invalid = serial).
inline int worker_threads() {
    const char* env = std::getenv("DOCSOURCE_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    if (v <= 1) return 1;
    return v;
}

// Runs fn(i) for i in [0, count). Callers must write results into
// index-addressed slots so parallel and serial runs agree byte for byte.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int threads = worker_threads();
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t n_workers = std::min<std::size_t>(std::size_t(threads), count);
    pool.reserve(n_workers);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t t = 0; t < n_workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace docsource
