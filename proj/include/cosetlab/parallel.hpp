#pragma once

// Fixed-chunk parallel loops. Work is cut into chunks whose boundaries do not
// depend on the thread count, and callers reduce per-chunk results in chunk
// order, so outputs are bitwise identical for any COSET_LAB_THREADS.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cosetlab {

/// COSET_LAB_THREADS if set to a positive integer, else the hardware count.
inline unsigned thread_count() {
    if (const char* env = std::getenv("COSET_LAB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline std::size_t chunk_count(std::size_t items, std::size_t chunk) { return (items + chunk - 1) / chunk; }

/// Calls fn(c, begin, end) for every chunk c of [0, items). Exceptions from
/// workers are rethrown on the calling thread.
template <class Fn>
void for_each_chunk(std::size_t items, std::size_t chunk, Fn&& fn) {
    const std::size_t chunks = chunk_count(items, chunk);
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(thread_count(), chunks));
    auto body = [&](std::size_t c) { fn(c, c * chunk, std::min(items, (c + 1) * chunk)); };
    if (threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < chunks; c = next++) {
                try {
                    body(c);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace cosetlab
