#pragma once

#include <cmath>
#include <cstdint>

namespace regionet {

// splitmix64. Used both as the project-wide generator and to derive
// independent per-task seeds from a master seed, so parallel work is
// reproducible regardless of scheduling. Output is fully specified by
// the seed; no standard-library distributions are involved, which keeps
// results identical across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double next_double_open() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    // Uniform in [-1, 1).
    double next_signed() { return 2.0 * next_double() - 1.0; }

    // Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t x, r;
        do {
            x = next();
            r = x % n;
        } while (x - r > static_cast<std::uint64_t>(-n));
        return r;
    }

    // Standard normal via Box-Muller (one value per call; no state cached).
    double next_normal() {
        const double u1 = next_double_open();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

// Mixes stream identifiers into a master seed. Tasks keyed by distinct
// (a, b, c) triples get statistically independent streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    SplitMix64 mix(master);
    std::uint64_t s = mix.next() ^ a;
    s = SplitMix64(s).next() ^ b;
    s = SplitMix64(s).next() ^ c;
    return SplitMix64(s).next();
}

} // namespace regionet
