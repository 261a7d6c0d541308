#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace irskg {

using Rng = std::mt19937_64;

// splitmix64 finaliser; used to derive independent per-trial seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for trial `index` of stream `stream` under base seed `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return mix_seed(mix_seed(seed ^ mix_seed(stream)) + index);
}

// Circularly-symmetric complex Gaussian: real and imaginary parts each carry
// half the variance. A zero variance returns 0 without consuming draws.
inline std::complex<double> complex_gaussian(Rng& rng, double variance) {
    if (!(variance > 0.0)) {
        return {0.0, 0.0};
    }
    std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline double uniform_phase(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159265358979323846);
    return u(rng);
}

}  // namespace irskg
