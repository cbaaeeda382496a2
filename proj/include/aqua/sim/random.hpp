#pragma once

#include <cstdint>
#include <initializer_list>

namespace aqua::sim {

/// SplitMix64 finalizer (Steele, Lea & Flood, 2014). Bijective 64-bit mix.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Maps the top 53 bits of a 64-bit word onto [0, 1).
constexpr double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seeded random source with a fixed, portable bit stream.
///
/// The sequential stream is SplitMix64: state advances by the golden-gamma
/// constant 0x9e3779b97f4a7c15 and each output is `splitmix64_mix(state)`.
/// Uniform reals take the top 53 bits, so the same seed produces the same
/// doubles on every IEEE-754 platform. No `<random>` distributions are used
/// because their output is implementation-defined.
///
/// `keyed_uniform` is a counter-based draw: the value depends only on the
/// seed and the key tuple, never on how many draws happened before it. The
/// transport uses it so that a packet's loss outcome on a given link and
/// attempt stays fixed when unrelated parameters (rates, timing) change.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept {
    state_ += kGamma;
    return splitmix64_mix(state_);
  }

  /// Next value of the sequential stream, in [0, 1).
  double uniform() noexcept { return to_unit_interval(next_u64()); }

  /// Stateless draw in [0, 1) addressed by `key`.
  double keyed_uniform(std::initializer_list<std::uint64_t> key) const noexcept {
    std::uint64_t h = splitmix64_mix(seed_ + kGamma);
    for (std::uint64_t k : key) {
      h = splitmix64_mix(h ^ splitmix64_mix(k + kGamma));
    }
    return to_unit_interval(h);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace aqua::sim
