#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace wulff {

/// Worker cap: explicit request, else WULFFFLOW_THREADS, else hardware.
inline int resolve_workers(int requested = 0) {
    int w = requested;
    if (w <= 0) {
        if (const char* env = std::getenv("WULFFFLOW_THREADS")) w = std::atoi(env);
    }
    if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, w);
}

/// Run fn(chunk) for chunk = 0..chunks-1 on up to `workers` threads.
/// Chunk assignment and result handling are the caller's responsibility;
/// results must be written to per-chunk slots so the outcome is independent
/// of scheduling.
inline void parallel_chunks(int chunks, int workers, const std::function<void(int)>& fn) {
    workers = std::min(std::max(1, workers), chunks);
    if (workers == 1) {
        for (int c = 0; c < chunks; ++c) fn(c);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([=] {
            for (int c = w; c < chunks; c += workers) fn(c);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace wulff
