#include "paramosc/parallel.hpp"

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace paramosc {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned hw = std::thread::hardware_concurrency();
    if (n == 0) return;
    if (hw <= 1 || n < 16) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    const std::size_t workers = std::min<std::size_t>(hw, n);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace paramosc
