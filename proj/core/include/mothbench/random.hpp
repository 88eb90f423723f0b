#pragma once

#include <cstdint>
#include <random>

namespace mothbench {

using Rng = std::mt19937_64;

// Independent, reproducible stream `stream` derived from a base seed. Every
// random draw in the library comes from a generator built here.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6d6f7468u};
  return Rng(seq);
}

// Zero draws are consumed when stddev == 0.
inline double gaussian(Rng& rng, double mean, double stddev) {
  if (stddev <= 0.0) return mean;
  return std::normal_distribution<double>(mean, stddev)(rng);
}

}  // namespace mothbench
