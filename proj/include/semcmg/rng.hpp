#pragma once

#include <cstdint>
#include <random>

namespace semcmg {

using Rng = std::mt19937_64;

/// Independent generator for one (seed, stream) pair. Used to give every
/// distance bin its own stream so results do not depend on scheduling.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

/// Uniform draw on [0, 1).
inline double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace semcmg
