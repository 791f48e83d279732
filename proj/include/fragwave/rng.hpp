#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace fragwave {

namespace detail {

// Stafford variant 13 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

// Derives an independent master key for a sub-experiment from a user seed.
// Distinct salts give decorrelated keys, so separate measurements in one
// process never share a stream.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t salt) {
  return detail::mix64(seed + detail::kGoldenGamma * (2u * salt + 1u));
}

// Counter-based generator in the SplittableRandom family.  A stream is a pure
// function of (key, stream index): trial i always sees the same draws no
// matter how trials are partitioned across threads, which makes parallel runs
// bit-identical to sequential ones.
class SplitRng {
 public:
  SplitRng(std::uint64_t key, std::uint64_t stream)
      : state_(detail::mix64(key + detail::kGoldenGamma * stream) ^ key) {}

  std::uint64_t next_u64() {
    state_ += detail::kGoldenGamma;
    return detail::mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate; uses log1p so tiny uniforms do not lose
  // precision.  Result is strictly positive.
  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    double u = next_unit();
    return -std::log1p(-u) / rate;
  }

  // Uniform index in [0, n) via Lemire's multiply-shift rejection method.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
    const std::uint64_t reject_below = (0ULL - n) % n;  // 2^64 mod n
    while (true) {
      __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
      if (static_cast<std::uint64_t>(m) >= reject_below)
        return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace fragwave
