// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace qyao {

using Rng = std::mt19937_64;

/// Independent sub-streams of one execution seed. Keeping client, server,
/// measurement and flag draws apart lets the interactive and one-time-memory
/// executions consume identical measurement randomness.
enum class Stream : std::uint32_t {
  client = 1,
  server = 2,
  physics = 3,
  flags = 4,
  adversary = 5,
  trial = 6,
};

inline Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Uniform integer in [0, n), exact (rejection sampling).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

inline bool random_bit(Rng& rng) { return (rng() >> 63) != 0; }

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Seed for trial `index` of a Monte Carlo batch.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
  auto rng = make_stream(seed, Stream::trial, index);
  return rng();
}

}  // namespace qyao
