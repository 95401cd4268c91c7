#pragma once

#include <cstdint>
#include <string_view>

namespace scalelaw::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t hash_string(std::string_view s);

/// Counter-based random stream: every draw is a pure function of
/// (key, counter), so parallel consumers are reproducible regardless of
/// scheduling. Substreams are derived by mixing the parent seed with a
/// substream id.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t substream)
      : key_(mix(seed, substream)) {}

  /// Uniform in (0, 1).
  double uniform(std::uint64_t counter) const;

  /// Standard normal via Box-Muller; consumes two internal uniforms.
  double normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

}  // namespace scalelaw::rng
