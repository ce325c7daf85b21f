#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace sigmaridge {

// Boost's engine and ziggurat normal sampler produce the same stream on every
// platform, unlike std::normal_distribution.
using Engine = boost::random::mt19937_64;
using StandardNormal = boost::random::normal_distribution<double>;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of sub-stream `index` under `parent`. A pure function of its two
/// arguments, so stream j is the same whether or not streams 0..j-1 are drawn.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(parent) ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL));
}

/// Nested derivation for multi-level keys, e.g. (seed, cell, rep, role).
template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index, Rest... rest) noexcept {
    return derive_seed(derive_seed(parent, index), static_cast<std::uint64_t>(rest)...);
}

}  // namespace sigmaridge
