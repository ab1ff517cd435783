#pragma once

// Seeding and random streams.
//
// Two kinds of randomness are used:
//  * CounterStream: a counter-based SplitMix64 stream. The i-th draw is a pure
//    function of (key, i), so every ordered node pair (u, v) owns the substream
//    at index u * n + v. Edge sampling is therefore reproducible regardless of
//    evaluation order or how rows are split across threads.
//  * Rng: a sequential std::mt19937_64 for label shuffles and k-means seeding.
//    Uniform variates are built from raw engine bits rather than the
//    <random> distributions so that output does not depend on the standard
//    library implementation.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace sbmase {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Order-sensitive hash of a tuple of integers.
constexpr std::uint64_t hash_combine(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p + kGoldenGamma));
  return h;
}

// Child seed for an independent purpose (stream tag) under a parent seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> parts) noexcept {
  return mix64(seed + kGoldenGamma) ^ hash_combine(parts);
}

// 53-bit uniform in [0, 1).
constexpr double to_unit_double(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t bits(std::uint64_t index) const noexcept {
    return mix64(key_ + (index + 1) * kGoldenGamma);
  }
  constexpr double uniform(std::uint64_t index) const noexcept {
    return to_unit_double(bits(index));
  }

 private:
  std::uint64_t key_;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return to_unit_double(engine_()); }

  // Uniform integer in [0, bound), bound > 0. Rejection sampling removes
  // modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Stream tags used with derive_seed.
enum StreamTag : std::uint64_t {
  kTauStream = 1,
  kEdgeStream = 2,
  kClusterStream = 3,
  kReplicateStream = 4,
};

}  // namespace sbmase
