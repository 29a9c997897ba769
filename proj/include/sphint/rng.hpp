// Seeded random streams. Every stochastic routine takes an explicit 64-bit
// seed; independent sub-streams (per replicate, per worker batch) are derived
// with SplitMix64 so results never depend on scheduling.
#pragma once

#include <cstdint>
#include <random>

namespace sphint {

// One SplitMix64 step: a bijective 64-bit mix with good avalanche.
std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Seed of the `stream`-th child of `seed`. Children of distinct streams
  // are statistically independent for practical purposes.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

  double gaussian() { return normal_(engine_); }
  double uniform01() { return uniform_(engine_); }
  // +1 or -1 with probability 1/2 each.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace sphint
