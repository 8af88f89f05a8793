#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace pgrav {

/// SplitMix64 finalizer; bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * Counter-based generator keyed by (seed, replica, stream).
 *
 * The i-th output is a pure function of the key and i, so results do not
 * depend on how replicas are scheduled across threads.
 */
class CounterRng {
public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t replica = 0, std::uint64_t stream = 0) noexcept
      : key_(mix64(mix64(mix64(seed) ^ (replica * 0xd1b54a32d192ed03ULL)) ^
                   (stream * 0x8cb92ba72f3d8dd7ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t c = counter_++;
    return mix64(key_ ^ mix64(c * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open0() noexcept { return 1.0 - uniform(); }

  /// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept {
    if (n <= 1) return 0;
    while (true) {
      const __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
      const auto low = static_cast<std::uint64_t>(m);
      if (low >= n || low >= (0 - n) % n) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  double exponential(double rate) noexcept { return -std::log(uniform_open0()) / rate; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace pgrav
