// parallel.hpp — Data-parallel loop over an index range. Thread count is
// capped by the DECLAB_THREADS environment variable; work items write only
// their own output slots, so results do not depend on the thread count.

#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace declab::cli {

inline unsigned thread_cap() {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DECLAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = static_cast<unsigned>(v);
    }
    return cap;
}

inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const unsigned threads = std::min<std::size_t>(thread_cap(), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace declab::cli
