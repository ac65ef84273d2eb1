#include "groove/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace groove {

namespace {

std::atomic<int> g_override{-1};  // -1: not set, use environment

int env_threads() {
    const char* s = std::getenv("GROOVESOLVE_THREADS");
    if (!s) return 0;
    int v = std::atoi(s);
    return v < 0 ? 0 : v;
}

}  // namespace

int max_threads() {
    int o = g_override.load(std::memory_order_relaxed);
    int n = (o >= 0) ? o : env_threads();
    if (n == 0) {
        unsigned hc = std::thread::hardware_concurrency();
        n = hc ? static_cast<int>(hc) : 1;
    }
    return n;
}

void set_max_threads(int n) { g_override.store(n < 0 ? -1 : n, std::memory_order_relaxed); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = static_cast<std::size_t>(max_threads());
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n || failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace groove
