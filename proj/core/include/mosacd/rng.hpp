#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mosacd {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent streams from (seed, key) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
    return mix64(seed ^ mix64(value));
}

/// 64-bit FNV-1a; stable across platforms, used for prompt hashes in transcripts.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Uniform double in [0,1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform01(Rng& rng) { return to_unit(rng()); }

}  // namespace mosacd
