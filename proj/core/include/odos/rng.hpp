#pragma once

#include <cstdint>
#include <random>

namespace odos {

using Rng = std::mt19937_64;

// SplitMix64 step; used to derive statistically independent child seeds from
// (seed, stream index) pairs so parallel workers never share a stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= h + a;
  h = splitmix64(s);
  s ^= h + b;
  return splitmix64(s);
}

// Child stream for work item `index` within logical stream `stream` of `seed`.
inline Rng child_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(mix_seed(seed, stream, index));
}

// Logical stream ids; keeping them distinct makes seed schedules reusable
// across estimator stages without collisions.
namespace streams {
inline constexpr std::uint64_t kOuterDraw = 1;
inline constexpr std::uint64_t kPlanSample = 2;
inline constexpr std::uint64_t kPosterior = 3;
inline constexpr std::uint64_t kPrior = 4;
inline constexpr std::uint64_t kScenario = 5;
inline constexpr std::uint64_t kSearch = 6;
}  // namespace streams

}  // namespace odos
