#pragma once

#include <cstdint>
#include <random>

namespace qsst {

using Rng = std::mt19937_64;

// splitmix64 step; used to derive independent per-trial seeds from one base
// seed so trials stay reproducible under any execution order.
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace qsst
