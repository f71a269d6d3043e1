// SPDX-License-Identifier: Apache-2.0

#ifndef WXMIMO_RNG_HPP
#define WXMIMO_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace wxmimo {

// splitmix64 step, used to derive independent sub-stream seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-task seed: (seed, a, b) -> stream seed. Independent tasks
// (gates, trials, internal noise/signal streams) each get their own value.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : eng_(derive_seed(seed, stream)) {}

    double gaussian() { return normal_(eng_); }

    // Circular complex gaussian with unit total variance (1/2 per component).
    std::complex<double> cgaussian() {
        const double re = normal_(eng_);
        const double im = normal_(eng_);
        return {re * kInvSqrt2, im * kInvSqrt2};
    }

    double uniform() { return uni_(eng_); }

private:
    static constexpr double kInvSqrt2 = 0.70710678118654752440;
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

} // namespace wxmimo

#endif
