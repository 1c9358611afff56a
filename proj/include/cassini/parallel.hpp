#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cassini {

/// 0 means "all hardware threads".
inline std::size_t resolve_workers(std::size_t requested) noexcept
{
    if (requested != 0) {
        return requested;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(task) for every task in [0, tasks), handing tasks out dynamically to
/// at most `workers` threads. Callers write results into per-task slots and merge
/// them in task order afterwards, so the outcome never depends on scheduling.
template <class Body>
void parallel_for(std::size_t tasks, std::size_t workers, Body&& body)
{
    workers = std::min(resolve_workers(workers), tasks);
    if (workers <= 1) {
        for (std::size_t t = 0; t < tasks; ++t) {
            body(t);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        try {
            for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) {
                body(t);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(tasks);
        }
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(run);
        }
        run();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace cassini
