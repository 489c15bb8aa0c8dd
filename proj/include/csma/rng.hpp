#pragma once

#include <cmath>
#include <cstdint>

namespace csma {

/// Deterministic 64-bit generator (xoshiro256++) with the distribution
/// transforms the simulators need. The same seed always produces the same
/// stream, independent of platform or standard-library version, which is what
/// makes seeded experiment re-runs byte-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    // splitmix64 expansion of the user seed into the full state.
    std::uint64_t x = seed;
    for (auto& s : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      s = z ^ (z >> 31);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    // uniform() < 1, so log1p(-u) is finite.
    return -std::log1p(-uniform()) / rate;
  }

  /// Geometric on {1, 2, ...} with success probability p: P(k) = p(1-p)^(k-1).
  std::uint64_t geometric(double p) {
    if (p >= 1.0) return 1;
    const double u = uniform();
    const double k = std::floor(std::log1p(-u) / std::log1p(-p));
    return static_cast<std::uint64_t>(k) + 1;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace csma
