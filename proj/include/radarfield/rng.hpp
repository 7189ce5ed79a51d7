#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

// Splittable random streams for reproducible Monte Carlo. One 64-bit root
// seed is hashed (SplitMix64) with structural tags -- scene index, slot
// index, purpose -- into independent substream keys, so results do not
// depend on how work is scheduled across threads.

namespace radarfield::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mixes a key with tags into a new substream key.
inline std::uint64_t derive(std::uint64_t key, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = key;
    std::uint64_t h = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b + 0xc2b2ae3d27d4eb4fULL;
    h ^= splitmix64(s);
    return h;
}

// Stream purposes (first tag passed to derive()).
enum : std::uint64_t {
    kTagScene = 0x5343454eULL,    // point positions / boresights / counts
    kTagRxBoresight = 0x52585842ULL,
    kTagFading = 0x46414445ULL,   // per-slot interferer fading
    kTagEcho = 0x4543484fULL,     // per-trial echo fading
    kTagGeneric = 0x47454e52ULL,
};

/// xoshiro256** -- small, fast, and trivially seedable from a 64-bit key.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t key = 0) { seed(key); }

    void seed(std::uint64_t key) {
        for (auto& w : s_) w = splitmix64(key);
    }

    std::uint64_t operator()() {
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

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unit-mean exponential draw (Rayleigh-fading power coefficient).
    double exponential() { return -std::log1p(-uniform()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace radarfield::rng
