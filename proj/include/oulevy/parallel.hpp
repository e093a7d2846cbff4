#pragma once

#include "oulevy/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oulevy {

// Budget of one Monte Carlo estimate. Replica r always draws from
// Rng::for_replica(seed, r); `threads` only changes wall time.
struct MonteCarlo {
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    unsigned threads = 1;

    MonteCarlo stream(std::uint64_t tag) const { return {derive_seed(seed ^ 0x5eed5eed5eedULL, tag), samples, threads}; }
    MonteCarlo with_samples(std::uint64_t n) const { return {seed, n, threads}; }
};

inline constexpr std::uint64_t replica_chunk = 2048;

// Runs body(r, rng, acc) for every replica and merges per-chunk
// accumulators in chunk order. Chunk boundaries do not depend on the
// thread count, so floating-point results are bitwise reproducible.
template <class Acc, class Body>
Acc replicate(const MonteCarlo& mc, Acc init, Body&& body)
{
    const std::uint64_t n = mc.samples;
    const std::uint64_t chunks = (n + replica_chunk - 1) / replica_chunk;
    std::vector<Acc> partial(chunks, init);

    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t lo = c * replica_chunk;
        const std::uint64_t hi = std::min(n, lo + replica_chunk);
        Acc& acc = partial[c];
        for (std::uint64_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replica(mc.seed, r);
            body(r, rng, acc);
        }
    };

    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, mc.threads), chunks));
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c)
            run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_lock;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                try {
                    for (std::uint64_t c = next++; c < chunks; c = next++)
                        run_chunk(c);
                } catch (...) {
                    std::lock_guard lock(failure_lock);
                    if (!failure)
                        failure = std::current_exception();
                    next = chunks;
                }
            });
        }
        for (auto& t : pool)
            t.join();
        if (failure)
            std::rethrow_exception(failure);
    }

    Acc total = init;
    for (auto& p : partial)
        total.merge(p);
    return total;
}

// Fills out[r] = make(r, rng) for every replica, in parallel.
template <class T, class Make>
std::vector<T> generate(const MonteCarlo& mc, Make&& make)
{
    struct Slot {
        std::vector<T>* out;
        void merge(const Slot&) {}
    };
    std::vector<T> out(mc.samples);
    replicate(mc, Slot{&out}, [&](std::uint64_t r, Rng& rng, Slot& s) { (*s.out)[r] = make(r, rng); });
    return out;
}

} // namespace oulevy
