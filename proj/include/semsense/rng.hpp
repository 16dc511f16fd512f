#pragma once

#include <cstdint>

namespace semsense {

// splitmix64 step; used to derive independent per-item seeds from a master
// seed so that sweep points stay order-independent.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t state = master ^ (0x2545f4914f6cdd1dULL * (index + 1));
    return splitmix64(state);
}

} // namespace semsense
