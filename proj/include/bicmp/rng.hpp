#pragma once

#include <cstdint>
#include <random>

namespace bicmp {

using Rng = std::mt19937_64;

// Derives an independent generator from a master seed and stream ids, so
// chains, replicates and per-task workers never share a stream.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0,
                    std::uint64_t substream = 0) {
  std::seed_seq seq{seed, stream, substream};
  return Rng(seq);
}

}  // namespace bicmp
