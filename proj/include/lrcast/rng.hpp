#pragma once

#include <cstdint>
#include <random>

namespace lrcast {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent engine seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` under `master`. Pure function of its arguments.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits of one engine output.
double uniform01(Engine& engine);

/// True with probability p; consumes exactly one engine output.
bool bernoulli(Engine& engine, double p);

/// Master seed; trial i draws from derive_seed(master_seed, i).
struct RngSpec {
  std::uint64_t master_seed = 0;

  std::uint64_t trial_seed(std::uint64_t trial) const { return derive_seed(master_seed, trial); }
};

}  // namespace lrcast
