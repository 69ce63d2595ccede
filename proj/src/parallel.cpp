#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace rcd {
namespace {

thread_local bool inside_parallel_region = false;

}  // namespace

int max_threads() {
    if (const char* env = std::getenv("RC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int threads = inside_parallel_region
                            ? 1
                            : std::min<int>(max_threads(), static_cast<int>(n));
    if (threads <= 1) {
        const bool was_inside = inside_parallel_region;
        inside_parallel_region = true;
        for (std::size_t i = 0; i < n; ++i) fn(i);
        inside_parallel_region = was_inside;
        return;
    }

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::size_t> error_index(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    const std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) /
                              static_cast<std::size_t>(threads);
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = static_cast<std::size_t>(t) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        workers.emplace_back([&, t, lo, hi] {
            inside_parallel_region = true;
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                    error_index[static_cast<std::size_t>(t)] = i;
                    break;
                }
            }
        });
    }
    for (auto& w : workers) w.join();

    std::exception_ptr first;
    std::size_t first_index = n;
    for (std::size_t t = 0; t < errors.size(); ++t) {
        if (errors[t] && error_index[t] < first_index) {
            first = errors[t];
            first_index = error_index[t];
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace rcd
