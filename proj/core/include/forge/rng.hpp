#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace forge {

/// SplitMix64 finalizer (Steele, Lea, Flood). Used for seeding and seed
/// derivation only.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stage identifiers for derive_seed.
namespace stage {
inline constexpr std::uint64_t kGenerate = 1;
inline constexpr std::uint64_t kJumbledSample = 2;
inline constexpr std::uint64_t kSparsify = 3;
inline constexpr std::uint64_t kLll = 4;
inline constexpr std::uint64_t kColoring = 5;
inline constexpr std::uint64_t kTransversal = 6;
inline constexpr std::uint64_t kCertify = 7;
}  // namespace stage

/// Derive an independent seed for retry `index` of pipeline stage `stage`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stage, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ (stage * 0xD1B54A32D192ED03ULL)) ^ index);
}

/// xorshift64* (Vigna 2016): shifts 12/25/27, multiplier 0x2545F4914F6CDD1D.
/// Every random draw in the toolkit goes through this generator, and all
/// derived draws (integers, doubles, subsets) are implemented here so that
/// output is identical across platforms and standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform in [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound) noexcept {
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = (*this)();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return unit() < p; }

  template <class T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace forge
