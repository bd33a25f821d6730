#pragma once

#include <array>
#include <cstdint>

#include <boost/random/normal_distribution.hpp>

namespace q4f {

/// Mixes two 64-bit words into a well-scrambled seed (SplitMix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

/// Deterministic random stream keyed by (seed, stream_index).
///
/// The state of a xoshiro256++ generator is filled from SplitMix64 output
/// seeded by mix_seed(seed, stream_index), so each index names an
/// independent substream. Satisfies UniformRandomBitGenerator. Not
/// thread-safe; give each worker its own stream.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

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

  /// Standard normal (ziggurat).
  double normal() { return normal_(*this); }

  /// Fair +1/-1.
  double sign() noexcept { return ((*this)() >> 63) != 0 ? 1.0 : -1.0; }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_index() const noexcept { return stream_index_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace q4f
