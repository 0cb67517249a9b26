#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fno {

/// Static-partition parallel loop. Thread t owns the contiguous index range
/// [n*t/used, n*(t+1)/used), so the partition (and therefore any per-thread
/// accumulation order) is a pure function of (n, n_threads). n_threads <= 1
/// runs inline. The first exception raised by any worker is rethrown here.
inline void parallel_for(int64_t n, int n_threads, const std::function<void(int64_t)>& body) {
    if (n <= 0) return;
    if (n_threads <= 1 || n == 1) {
        for (int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    int used = static_cast<int>(std::min<int64_t>(n_threads, n));
    std::vector<std::thread> workers;
    workers.reserve(used);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int t = 0; t < used; ++t) {
        int64_t begin = n * t / used;
        int64_t end = n * (t + 1) / used;
        workers.emplace_back([&, begin, end] {
            try {
                for (int64_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline int hardware_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace fno
