#include "corrchange/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace corrchange {

namespace {

std::atomic<int> g_max_threads{0};
thread_local bool t_inside_parallel = false;

int resolved_threads() {
    const int cap = g_max_threads.load(std::memory_order_relaxed);
    if (cap > 0) return cap;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void set_max_threads(int n) { g_max_threads.store(n, std::memory_order_relaxed); }

int max_threads() { return resolved_threads(); }

namespace detail {

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const int threads = t_inside_parallel ? 1 : resolved_threads();
    if (threads <= 1 || n == 1) {
        body(0, n);
        return;
    }

    const std::size_t workers = std::min<std::size_t>(threads, n);
    const std::size_t chunk = (n + workers - 1) / workers;

    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex error_mutex;

    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            t_inside_parallel = true;
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail
}  // namespace corrchange
