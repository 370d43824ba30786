#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace resalloc {

/// Counter-based deterministic generator (splitmix64). One 64-bit state,
/// identical streams on every platform.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline constexpr const char* kGeneratorName = "splitmix64";

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stream for one (experiment, seed) pair:
/// state = fnv1a64(experiment_id) + golden_ratio * seed.
inline SplitMix64 experiment_rng(std::string_view experiment_id, std::uint64_t seed) {
    return SplitMix64{fnv1a64(experiment_id) + 0x9e3779b97f4a7c15ULL * seed};
}

inline double draw_uniform(SplitMix64& rng, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("draw_uniform: need lo < hi");
    return lo + rng.next_unit() * (hi - lo);
}

/// Normal(mean, sd) truncated to [lo, hi] by rejection; Box-Muller pairs
/// drawn from the same deterministic stream.
inline double draw_truncated_normal(SplitMix64& rng, double mean, double sd, double lo,
                                    double hi) {
    if (!(sd > 0.0)) throw std::invalid_argument("draw_truncated_normal: sd must be positive");
    if (!(lo < hi)) throw std::invalid_argument("draw_truncated_normal: need lo < hi");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const double u1 = (static_cast<double>(rng.next() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = rng.next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double z1 = r * std::cos(6.283185307179586476925286766559 * u2);
        const double z2 = r * std::sin(6.283185307179586476925286766559 * u2);
        for (double z : {z1, z2}) {
            const double v = mean + sd * z;
            if (v >= lo && v <= hi) return v;
        }
    }
    throw std::runtime_error("draw_truncated_normal: rejection did not terminate");
}

}  // namespace resalloc
