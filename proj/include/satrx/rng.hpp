// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random utilities. Every stochastic component of the
// simulator draws through these helpers instead of <random> distributions,
// whose output sequences are implementation-defined. mt19937_64 itself is
// fully specified by the standard, so a (seed, draw order) pair pins the
// entire stream on any platform.

#ifndef SATRX_RNG_HPP
#define SATRX_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace satrx {

// SplitMix64 step; used to derive child seeds from (root, index...) tuples.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a) {
    return splitmix64(root ^ splitmix64(a + 0x632be59bd9b4e019ull));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(root, a), b);
}

// Uniform integer in [0, n). Multiply-shift reduction; the modulo bias of
// a 64-bit source over n <= 2^32 is far below anything our statistical
// tests can resolve.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One standard normal draw via Box-Muller. Two uniforms are consumed per
// pair of normals; the spare is cached so the draw count is predictable
// only per-object. Monte-Carlo code that needs a pinned draw count uses
// normal_pair() directly.
class NormalSampler {
public:
    double operator()(std::mt19937_64& rng) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [a, b] = normal_pair(rng);
        spare_ = b;
        have_spare_ = true;
        return a;
    }

    static std::pair<double, double> normal_pair(std::mt19937_64& rng) {
        double u1 = uniform01(rng);
        double u2 = uniform01(rng);
        // Guard log(0); 2^-53 shift keeps u1 in (0,1].
        double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        double t = 2.0 * M_PI * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

private:
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace satrx

#endif
