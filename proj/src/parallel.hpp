#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace scenestat::detail {

// Runs fn(0..n-1) on up to `jobs` workers (<= 0 means hardware concurrency).
// Each index owns its output slot, so results are independent of scheduling.
inline void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const size_t n_workers = std::min(static_cast<size_t>(jobs), n);
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(n_workers);
    std::vector<std::thread> workers;
    workers.reserve(n_workers);
    for (size_t w = 0; w < n_workers; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next.store(n);  // let the other workers drain
            }
        });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace scenestat::detail
