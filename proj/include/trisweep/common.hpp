#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace trisweep {

// Bad arguments or malformed input files. The CLI maps this to exit code 1.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical breakdown (non-convergence, degenerate data). CLI exit code 2.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-dependent mixer used to derive per-task seeds (restarts, folds,
// per-sample generator streams). Chaining calls keys a seed on a tuple.
inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return splitmix64(seed ^ (splitmix64(value) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// mt19937_64 output is fully specified by the standard; the distributions
// are not, so every draw below is hand-rolled to keep streams identical
// across compilers.
using Rng = std::mt19937_64;

// Uniform double in [0, 1), 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). Floor of u*n; the tiny bias is irrelevant here.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    if (n == 0) throw std::logic_error("uniform_index: n must be positive");
    std::size_t i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return i < n ? i : n - 1;
}

// Standard normal via Box-Muller (cosine branch only).
inline double normal01(Rng& rng) {
    double u1 = 1.0 - uniform01(rng);  // (0, 1]
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace trisweep
