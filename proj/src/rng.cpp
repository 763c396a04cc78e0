#include "pk/rng.hpp"

#include <cmath>

namespace pk {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  // splitmix64 is a fine generator on its own for simulation workloads.
  return splitmix64(state_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

int RngStream::uniform_int(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next_u64() % span);
}

double RngStream::normal() {
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

double RngStream::normal(double mean, double sd) { return mean + sd * normal(); }

std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::string_view name) {
  std::uint64_t x = base_seed ^ fnv1a(name);
  return splitmix64(x);
}

RunRng RunRng::make(std::uint64_t base_seed) {
  return RunRng{
      RngStream(derive_stream_seed(base_seed, "env")),
      RngStream(derive_stream_seed(base_seed, "policy-init")),
      RngStream(derive_stream_seed(base_seed, "exploration")),
      RngStream(derive_stream_seed(base_seed, "buffer")),
  };
}

}  // namespace pk
