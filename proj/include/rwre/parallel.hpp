#ifndef RWRE_PARALLEL_HPP
#define RWRE_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs worker(replica_index, derived_seed) for every replica and merges the
// partial results.  Replicas are processed in fixed-size blocks; each block
// is reduced in index order and blocks are merged in index order afterwards,
// so the result (including floating-point sums) is identical for any thread
// count.  merge must be associative; worker results must not depend on
// shared mutable state.
template <class Partial, class Worker, class Merge>
Partial parallel_map(std::uint64_t n_replicas, std::uint64_t base_seed, int threads,
                     Partial init, Worker&& worker, Merge&& merge) {
    const int nthreads = resolve_threads(threads);
    constexpr std::uint64_t kBlock = 256;
    const std::uint64_t n_blocks = (n_replicas + kBlock - 1) / kBlock;

    std::vector<Partial> block_results(static_cast<std::size_t>(n_blocks), init);
    std::atomic<std::uint64_t> next_block{0};
    std::mutex fail_mutex;
    std::optional<WorkerError> failure;

    auto run = [&]() {
        for (;;) {
            const std::uint64_t b = next_block.fetch_add(1);
            if (b >= n_blocks) return;
            {
                std::lock_guard<std::mutex> lk(fail_mutex);
                if (failure) return;
            }
            Partial acc = init;
            const std::uint64_t lo = b * kBlock;
            const std::uint64_t hi = std::min(n_replicas, lo + kBlock);
            for (std::uint64_t r = lo; r < hi; ++r) {
                const std::uint64_t seed = derive_seed(base_seed, r);
                try {
                    merge(acc, worker(r, seed));
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lk(fail_mutex);
                    if (!failure) {
                        failure.emplace("replica " + std::to_string(r) + " (derived seed " +
                                            std::to_string(seed) + ") failed: " + e.what(),
                                        r, seed);
                    }
                    return;
                }
            }
            block_results[static_cast<std::size_t>(b)] = std::move(acc);
        }
    };

    if (nthreads == 1 || n_blocks <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        const int spawn = static_cast<int>(
            std::min<std::uint64_t>(static_cast<std::uint64_t>(nthreads), n_blocks));
        pool.reserve(static_cast<std::size_t>(spawn));
        for (int t = 0; t < spawn; ++t) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }

    if (failure) throw *failure;

    Partial total = init;
    for (auto& p : block_results) merge(total, p);
    return total;
}

}  // namespace rwre

#endif
