#include "q4f/rng.hpp"

namespace q4f {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t s = salt;
  std::uint64_t t = seed ^ splitmix64(s);
  return splitmix64(t);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index) noexcept
    : seed_(seed), stream_index_(stream_index) {
  std::uint64_t sm = mix_seed(seed, stream_index);
  for (auto& word : state_) word = splitmix64(sm);
  // xoshiro must not start from the all-zero state
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
}

}  // namespace q4f
