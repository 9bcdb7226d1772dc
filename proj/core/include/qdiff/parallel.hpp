#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qdiff {

// Run fn(taskIndex) for taskIndex in [0, nTasks) on up to `workers` threads.
//
// Tasks are handed out by an atomic ticket, but every task knows its own
// index, so any per-task output written to slot `taskIndex` of a pre-sized
// vector is identical for every worker count.  Reductions over such vectors
// must then run sequentially in index order to stay bit-reproducible.
inline void run_indexed_tasks(std::size_t nTasks, unsigned workers,
                              const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || nTasks <= 1) {
        for (std::size_t i = 0; i < nTasks; ++i) fn(i);
        return;
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(nTasks));
    std::atomic<std::size_t> ticket{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error = nullptr;
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = ticket.fetch_add(1);
                if (i >= nTasks || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qdiff
