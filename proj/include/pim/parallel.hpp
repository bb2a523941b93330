#pragma once

#include "pim/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pim {

/// Maximum worker count: the PIM_THREADS environment variable when set to a
/// positive integer, hardware concurrency otherwise.
inline int worker_count()
{
    if (const char* env = std::getenv("PIM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) return cap;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Calls body(i) for i in [0, count) over static contiguous chunks. Results must
/// not depend on scheduling: each index is handled by exactly one worker.
template <typename Body>
void parallel_for(Index count, Body&& body)
{
    const int workers = static_cast<int>(std::min<Index>(worker_count(), std::max<Index>(count / 64, 1)));
    if (workers <= 1) {
        for (Index i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const Index chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const Index begin = w * chunk;
        const Index end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                for (Index i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& thread : threads) thread.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace pim
