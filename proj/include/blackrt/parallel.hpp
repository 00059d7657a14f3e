#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace blackrt {

// Worker count: BLACKRT_THREADS caps hardware concurrency; values < 1 mean serial.
inline unsigned thread_budget() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("BLACKRT_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env) n = cap < 1 ? 1u : std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

// Chunked parallel sweep over [0, n). body(i) must write only to slot i of its
// outputs; results are then independent of the thread count.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
    const unsigned workers = thread_budget();
    if (workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = static_cast<std::size_t>(w) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace blackrt
