// SPDX-License-Identifier: Apache-2.0
//
// Deterministic randomness utilities.
//
// Reproducibility contract: all simulation outputs depend only on explicit
// 64-bit seeds. std::mt19937_64's output sequence for a given 64-bit seed is
// pinned by the C++ standard, but std::uniform_int_distribution and friends
// are implementation-defined, so this header supplies its own unbiased
// mappings from raw engine output to integers, reals, and coin flips.

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace longldp {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer: a high-quality 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Order-sensitive seed/tag combiner (hash-combine style with a strong mix).
constexpr std::uint64_t seed_combine(std::uint64_t seed,
                                     std::uint64_t tag) noexcept {
  return mix64(seed ^ (tag + kGolden + (seed << 6) + (seed >> 2)));
}

// Named sub-streams carved out of one master seed so that independent
// components (dataset generation, per-user clients, ...) never share draws.
enum class Stream : std::uint64_t {
  kDataset = 1,
  kClient = 2,
  kHash = 3,
  kAttack = 4,
};

constexpr std::uint64_t stream_seed(std::uint64_t master, Stream s) noexcept {
  return seed_combine(master, static_cast<std::uint64_t>(s));
}

// Per-user generator seed: depends only on (master seed, run index, user
// index), never on worker scheduling.
constexpr std::uint64_t user_seed(std::uint64_t master, std::uint64_t run,
                                  std::uint64_t user) noexcept {
  return seed_combine(seed_combine(stream_seed(master, Stream::kClient), run),
                      user);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased draw from [0, bound) by rejection.
  std::uint64_t uniform_u64(std::uint64_t bound) {
    if (bound == 0) {
      throw std::invalid_argument("Rng::uniform_u64: bound must be positive");
    }
    // (2^64 - bound) mod bound == 2^64 mod bound in 64-bit arithmetic.
    const std::uint64_t reject_below = (0 - bound) % bound;
    std::uint64_t r = engine_();
    while (r < reject_below) r = engine_();
    return r % bound;
  }

  // Uniform integer in [lo, hi], both inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) {
      throw std::invalid_argument("Rng::uniform_int: empty range");
    }
    const std::uint64_t span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    return lo + static_cast<std::int64_t>(uniform_u64(span));
  }

  // Uniform real in [0, 1) with 53-bit resolution.
  double uniform_real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform_real() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace longldp
