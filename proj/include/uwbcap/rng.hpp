#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace uwbcap::rng {

// Hand-rolled generator with explicit variate transforms so that a given
// (seed, key...) substream produces the same bytes on every platform and
// under any parallel schedule. std::* distributions are implementation
// defined and would break that contract.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// xoshiro256++ stream, seeded from a master seed plus an arbitrary key list.
/// Distinct keys give statistically independent substreams, so work items can
/// be computed in any order (or concurrently) without changing their draws.
class Stream {
 public:
  Stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t seed = master;
    for (std::uint64_t k : keys) {
      // fold each key in through one splitmix round
      seed ^= splitmix64(k) + 0x9E3779B97F4A7C15ull + (seed << 6) + (seed >> 2);
    }
    for (auto& word : state_) word = splitmix64(seed);
  }

  std::uint64_t next_u64() {
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

  /// Uniform on [0, 1) with 53 significant bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate (mean 1/rate), strictly positive.
  double exponential(double rate) {
    double u = uniform01();
    if (u <= 0.0) u = 0x1.0p-53;
    return -std::log1p(-u) / rate;
  }

  /// Standard circularly-symmetric complex Gaussian: E|z|^2 = 1.
  std::complex<double> complex_normal() {
    double u = uniform01();
    if (u <= 0.0) u = 0x1.0p-53;
    const double radius = std::sqrt(-std::log(u));
    const double angle = 2.0 * std::numbers::pi * uniform01();
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
};

}  // namespace uwbcap::rng
