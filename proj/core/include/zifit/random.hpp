#pragma once

#include <cstdint>
#include <random>

namespace zifit {

using Rng = std::mt19937_64;

// SplitMix64 finalizer applied to (seed, stream); gives statistically
// independent substreams so replicate b never depends on scheduling.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed, stream));
}

}  // namespace zifit
