#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ppsource {

// SplitMix64. Chosen over <random> engines because the output stream must be
// bit-identical across platforms and standard library implementations, and
// because hashing (seed, stream) gives cheap independent substreams for
// parallel ensemble runs.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53-bit resolution
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // first-arrival time of a Poisson process; +inf when the rate is zero
    double exponential(double rate) {
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log1p(-uniform01()) / rate;
    }

private:
    std::uint64_t state_;
};

// Derives an independent substream seed from (seed, stream index).
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ ((stream + 1) * 0xD1B54A32D192ED03ull));
    return g.next();
}

}  // namespace ppsource
