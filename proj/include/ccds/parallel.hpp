#ifndef ccds_parallel_hpp
#define ccds_parallel_hpp

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ccds {

inline int effectiveJobs(int requested) {
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/*! Runs f(i) for i in [0, n) on `jobs` workers pulling indices from a shared
    counter. The caller owns any output slots; determinism comes from writing
    results by index, never from scheduling order. */
template <class Fn>
void parallelFor(std::int64_t n, int jobs, Fn&& f) {
    jobs = effectiveJobs(jobs);
    if (n <= 0)
        return;
    if (jobs == 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex errorMutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n)
                return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(errorMutex);
                if (!error)
                    error = std::current_exception();
                next.store(n, std::memory_order_relaxed); // drain remaining work
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    const int workers = static_cast<int>(std::min<std::int64_t>(jobs, n));
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        threads.emplace_back(worker);
    for (auto& t : threads)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace ccds

#endif
