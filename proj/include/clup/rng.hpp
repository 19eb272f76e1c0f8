#ifndef CLUP_RNG_HPP
#define CLUP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace clup {

// Portable random primitives. std::mt19937_64 output is fully specified by
// the standard, and the uniform/normal mappings below are written out
// explicitly, so any implementation following the same recipe reproduces the
// same streams bit for bit. std::normal_distribution is deliberately avoided
// (its algorithm is implementation-defined).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    // Uniform on (0, 1]: 53 high bits of the next engine output.
    double uniform() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. Draws are produced in pairs
    // (cos branch first); flush() drops a cached second draw so that
    // independently generated segments start on a pair boundary.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double rho = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        cached_ = rho * std::sin(theta);
        have_cached_ = true;
        return rho * std::cos(theta);
    }

    void flush() { have_cached_ = false; }

    // Fair sign: +1 if the next uniform falls in (0, 0.5], else -1.
    int sign() { return uniform() <= 0.5 ? +1 : -1; }

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// splitmix64 finalizer; used to derive independent per-trial seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(mix64(base) ^ a) ^ b);
}

}  // namespace clup

#endif
