#pragma once

#include <cmath>
#include <cstdint>

namespace anct {

// splitmix64: used to expand the root seed into per-subsystem streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic generator (xoshiro256**). Each subsystem gets its own
// stream derived from (root_seed, stream_index) so toggling one
// subsystem never perturbs another's draws.
class Rng {
public:
    Rng() : Rng(0, 0) {}
    Rng(std::uint64_t root_seed, std::uint64_t stream_index) {
        std::uint64_t sm = root_seed ^ (0xa5a5a5a5a5a5a5a5ULL * (stream_index + 1));
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1). Hand-rolled so output is identical on every
    // platform (std <random> distributions are implementation-defined).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    double exponential(double mean) {
        double u = uniform();
        return -mean * std::log1p(-u);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Fixed stream indices, one per subsystem.
namespace rng_stream {
inline constexpr std::uint64_t mobility = 1;
inline constexpr std::uint64_t channel = 2;
inline constexpr std::uint64_t traffic = 3;
inline constexpr std::uint64_t adversary = 4;
} // namespace rng_stream

} // namespace anct
