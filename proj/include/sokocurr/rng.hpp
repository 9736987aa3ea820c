#pragma once

// Portable random helpers. std::mt19937_64's output sequence is fixed by the
// standard, but the std distributions are not, so seeded runs only go through
// the functions below.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace sokocurr {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for the i-th independent stream derived from `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) {
    return splitmix64(splitmix64(seed) ^ splitmix64(i + 0x632be59bd9b4e019ULL));
}

/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[uniform_index(rng, i)]);
    }
}

} // namespace sokocurr
