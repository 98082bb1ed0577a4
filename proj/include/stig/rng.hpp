#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace stig {

/// Seeded random stream with portable draw semantics. All randomness in the
/// library flows through this type so that a run is reproducible from a single
/// master seed. Subsystem streams are derived with `derive`, never shared.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1). Uses the top 53 bits of the engine output so
    /// the mapping does not depend on library-specific distribution code.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n). Rejection sampling, unbiased.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

    /// Box-Muller without caching; consumes exactly two uniforms per draw.
    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Derives a child seed from a master seed and a path of indices.
    /// splitmix64 steps keep distinct paths statistically independent.
    static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t h = seed;
        for (std::uint64_t p : path) {
            h = splitmix64(h ^ (p + 0x9e3779b97f4a7c15ULL));
        }
        return splitmix64(h);
    }

private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

} // namespace stig
