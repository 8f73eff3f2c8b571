#pragma once

#include <cstdint>
#include <random>

namespace hrt {

// splitmix64 finalizer; used to derive independent seeds so that parallel
// and serial builds agree on every subtree.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    return mix_seed(parent ^ mix_seed(stream));
}

using Rng = std::mt19937_64;

} // namespace hrt
