#pragma once

#include <cstdint>

namespace flowbench {

/// SplitMix64 mix; bijective, used to derive decorrelated sub-seeds.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter scheme: sub-seed i of a master seed.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    return splitmix64(master + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

/// Uniform double in [0,1) from a hash.
inline double hash_unit(uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace flowbench
