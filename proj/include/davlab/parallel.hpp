#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace davlab {

// Resolve a worker count: explicit argument wins, then the DAVLAB_THREADS
// environment variable, then 1.  Zero means "use hardware concurrency".
inline unsigned resolve_threads(unsigned requested) {
    unsigned t = requested;
    if (t == 0) {
        if (const char* env = std::getenv("DAVLAB_THREADS")) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end != env && v >= 0) t = static_cast<unsigned>(v);
        }
    }
    if (t == 0) t = 1;
    return t;
}

// Hardware-sized worker count for callers that pass 0 explicitly as "auto".
inline unsigned auto_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/*
 * Static block partition of [begin, end) over `threads` workers.  fn is called
 * as fn(worker_index, chunk_begin, chunk_end).  Determinism is the caller's
 * concern: workers should write to disjoint slots that are merged in index
 * order afterwards.
 */
template <typename Fn>
void parallel_chunks(std::size_t begin, std::size_t end, unsigned threads, Fn&& fn) {
    const std::size_t total = end > begin ? end - begin : 0;
    if (total == 0) return;
    if (threads <= 1 || total == 1) {
        fn(0u, begin, end);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(threads, total));
    const std::size_t chunk = (total + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = begin + static_cast<std::size_t>(w) * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, w, lo, hi] { fn(w, lo, hi); });
    }
    for (auto& th : pool) th.join();
}

} // namespace davlab
