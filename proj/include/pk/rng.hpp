#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pk {

/// Deterministic random stream. One base seed is split into independent
/// named streams so a change in one consumer does not reshuffle the others.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform01();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi);

  /// Standard normal via Box-Muller (no cached spare, fully deterministic).
  double normal();
  double normal(double mean, double sd);

 private:
  std::uint64_t state_;
};

/// Stream seed derivation: splitmix64 over seed xor fnv1a(name).
std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::string_view name);

/// The named streams used by one training/evaluation run.
struct RunRng {
  RngStream env;
  RngStream policy_init;
  RngStream exploration;
  RngStream buffer;

  static RunRng make(std::uint64_t base_seed);
};

}  // namespace pk
