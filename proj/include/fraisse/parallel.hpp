#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace fraisse {

/// Worker count: explicit value if positive, else FRAISSE_LAB_THREADS, else
/// the hardware concurrency.
inline unsigned resolve_threads(int requested = 0)
{
    if (requested > 0)
        return static_cast<unsigned>(requested);
    if (const char *env = std::getenv("FRAISSE_LAB_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v > 0)
                return static_cast<unsigned>(v);
        } catch (const std::exception &) {
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, n) on up to `threads` workers. Tasks write into
/// their own slot, so results merge in index order regardless of scheduling.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &task)
{
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                }
            }
        });
    for (auto &th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace fraisse
