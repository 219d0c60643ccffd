#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace plaq {

// Global worker cap (CLI --threads). 0 = hardware concurrency.
int thread_cap();
void set_thread_cap(int n);

// Run fn(block) for block = 0..nblocks-1 on a bounded pool. Results are
// collected per block index, so merging in index order is deterministic and
// independent of the number of workers.
template <typename Result, typename Fn>
std::vector<Result> run_blocks(int nblocks, Fn&& fn) {
    std::vector<Result> out(static_cast<size_t>(nblocks));
    int workers = thread_cap();
    if (workers <= 0) workers = int(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    workers = std::min(workers, nblocks);
    if (workers <= 1) {
        for (int b = 0; b < nblocks; ++b) out[size_t(b)] = fn(b);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int b = next.fetch_add(1);
                if (b >= nblocks) break;
                out[size_t(b)] = fn(b);
            }
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace plaq
