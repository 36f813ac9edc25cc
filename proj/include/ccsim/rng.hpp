#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>

namespace ccsim {

/// Seeded stream of random draws with hand-mapped distributions, so that a
/// trace is reproducible from (seed, stream id) alone on any platform.
/// Standard-library distribution objects are avoided on purpose: their mapping
/// from generator output is implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    /// Independent stream derived from a run seed and a stream tag.
    static RandomStream derive(std::uint64_t seed, std::uint64_t stream) {
        return RandomStream(splitmix64(seed ^ (stream * 0x9E3779B97F4A7C15ull)));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Exponential with the given mean; mean 0 collapses to 0.
    double exponential(double mean) {
        if (mean <= 0.0) return 0.0;
        return -mean * std::log1p(-uniform01());
    }

    /// Uniform index in [0, n). Rejection sampling keeps the draw unbiased.
    std::size_t pick(std::size_t n) {
        assert(n > 0);
        const std::uint64_t bound = n;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = gen_();
            if (x >= threshold) return static_cast<std::size_t>(x % bound);
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 gen_;
};

/// Stream tags used by the scenario driver. Arrivals get their own stream so
/// an arrival schedule can be regenerated without replaying the run.
namespace stream {
constexpr std::uint64_t kArrivals = 1;
constexpr std::uint64_t kFlow = 2;
} // namespace stream

} // namespace ccsim
