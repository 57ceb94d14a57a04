#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ktop {

// Runs fn(0..count-1) on `threads` workers and returns the results in task
// order.  Each task derives all randomness from its own index, so the
// output is independent of the worker count.
template <typename T>
std::vector<T> parallel_map(int count, int threads, const std::function<T(int)>& fn) {
    std::vector<T> results(static_cast<std::size_t>(count));
    if (count == 0) return results;
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) results[static_cast<std::size_t>(i)] = fn(i);
        return results;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                results[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return results;
}

/// Pins the BLAS backend to one thread.  Task-level parallelism stays in
/// parallel_map, and results do not depend on how BLAS partitions work.
void pin_blas_single_thread();

int hardware_threads();

} // namespace ktop
