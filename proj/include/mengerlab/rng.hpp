#pragma once

#include <cmath>
#include <cstdint>

namespace mengerlab {

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, counter), so parallel consumers can pull from disjoint
// streams and the merged result never depends on scheduling or thread count.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t x = seed_;
        x = mix(x ^ (0x9e3779b97f4a7c15ULL + stream));
        x = mix(x ^ (0xbf58476d1ce4e5b9ULL + counter));
        return mix(x);
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(std::uint64_t stream, std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(stream, counter);
    }

    // Standard normal via Box-Muller; consumes two counters (2*counter, 2*counter+1).
    double gaussian(std::uint64_t stream, std::uint64_t counter) const {
        const double u1 = uniform(stream, 2 * counter);
        const double u2 = uniform(stream, 2 * counter + 1);
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t uniform_index(std::uint64_t stream, std::uint64_t counter, std::uint64_t n) const {
        return bits(stream, counter) % n;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
};

// Convenience sequential view on one stream of a CounterRng.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed), stream_(stream) {}

    double uniform() { return rng_.uniform(stream_, next_++); }
    double uniform(double lo, double hi) { return rng_.uniform(stream_, next_++, lo, hi); }
    double gaussian() { return rng_.gaussian(stream_, next_++); }
    std::uint64_t uniform_index(std::uint64_t n) { return rng_.uniform_index(stream_, next_++, n); }

private:
    CounterRng rng_;
    std::uint64_t stream_;
    std::uint64_t next_ = 0;
};

}  // namespace mengerlab
