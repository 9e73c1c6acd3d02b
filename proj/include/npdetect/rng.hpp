#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace npdetect {

/// Streams are domain-separated so that, for example, calibration draws and
/// validation draws under the same seed never coincide.
enum class StreamTag : std::uint64_t {
  Sampling = 1,
  Calibration = 2,
  FalseAlarm = 3,
  Miss = 4,
  Moment = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

/// Generator for trial `index` under `seed`. Depends only on (seed, tag, index),
/// never on the order in which trials are executed.
inline Xoshiro256 substream(std::uint64_t seed, StreamTag tag, std::uint64_t index) noexcept {
  std::uint64_t k = seed;
  std::uint64_t key = splitmix64(k);
  k = key ^ static_cast<std::uint64_t>(tag);
  key = splitmix64(k);
  k = key ^ index;
  return Xoshiro256(splitmix64(k));
}

}  // namespace npdetect
