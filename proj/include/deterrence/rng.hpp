#pragma once

#include <cmath>
#include <cstdint>

namespace deterrence {

// Counter-based RNG: each path derives an independent substream from
// (seed, path_index), so ensembles do not depend on thread scheduling.
// Core mixer is splitmix64 (Steele et al., 2014).

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream) {
        // Decorrelate the stream id before combining with the seed.
        std::uint64_t s = stream;
        std::uint64_t mixed = splitmix64(s);
        state_ = seed ^ mixed;
        // Warm up so nearby (seed, stream) pairs diverge immediately.
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in (0, 1); never returns 0 or 1 exactly.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (one draw per call, cached pair).
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace deterrence
