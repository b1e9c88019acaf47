#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace qcorr {

/// Run fn(chunk_index) for chunk_index in [0, chunks), optionally on several
/// threads. Chunks must write to disjoint state; any reduction over chunk
/// results must be done by the caller in chunk order, so that the outcome is
/// independent of the thread count.
template <class Fn>
void for_each_chunk(std::uint64_t chunks, unsigned threads, Fn&& fn) {
    if (threads <= 1 || chunks <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) fn(c);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&fn, w, workers, chunks] {
            for (std::uint64_t c = w; c < chunks; c += workers) fn(c);
        });
    for (auto& t : pool) t.join();
}

}  // namespace qcorr
