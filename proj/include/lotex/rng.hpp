// Counter-keyed random streams.
//
// Every sampler in the library draws from an `Rng` keyed by a 64-bit seed.
// Replicate `i` of an experiment seeded with `s` uses `Rng(mix_seed(s, i))`,
// so the numbers a replicate sees never depend on which thread ran it or in
// what order replicates were scheduled.

#ifndef LOTEX_RNG_HPP
#define LOTEX_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace lotex {

/// SplitMix64 finalizer; a bijection on 64-bit words with full avalanche.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives the seed of stream `stream` from a parent seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// xoshiro256++ engine seeded through SplitMix64, with the handful of
/// variates the samplers need. Satisfies UniformRandomBitGenerator so the
/// Boost distributions (ziggurat normal, Marsaglia-Tsang gamma, PTRD Poisson)
/// can consume it; those are bit-reproducible across platforms.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t z = seed;
    for (auto& w : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      w = splitmix64(z);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
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

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe to take the logarithm of.
  double uniform_pos() noexcept { return 1.0 - uniform(); }

  double normal() { return normal_(*this); }

  double exponential() { return exponential_(*this); }

  double gamma(double shape) {
    return boost::random::gamma_distribution<double>(shape, 1.0)(*this);
  }

  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    return static_cast<std::uint64_t>(boost::random::poisson_distribution<std::int64_t, double>(mean)(*this));
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  boost::random::normal_distribution<double> normal_{};
  boost::random::exponential_distribution<double> exponential_{};
};

}  // namespace lotex

#endif  // LOTEX_RNG_HPP
