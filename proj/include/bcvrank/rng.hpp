#ifndef BCVRANK_RNG_HPP
#define BCVRANK_RNG_HPP

#include <cstdint>

#include "bcvrank/types.hpp"

namespace bcvrank {

/// SplitMix64 finalizer (Steele, Lea & Flood). Used for seed derivation only;
/// the working engine is std::mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a salt. Chaining calls gives
/// the (master_seed, cell, replicate) stream hierarchy used by the harness:
/// independent sub-streams regardless of evaluation order or worker count.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace bcvrank

#endif  // BCVRANK_RNG_HPP
