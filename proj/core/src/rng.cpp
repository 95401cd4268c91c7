#include "scalelaw/rng.hpp"

#include <cmath>
#include <numbers>

namespace scalelaw::rng {

std::uint64_t hash_string(std::string_view s) {
  // FNV-1a, then one mixing round so short ids spread out.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

double Stream::uniform(std::uint64_t counter) const {
  std::uint64_t bits = splitmix64(key_ ^ splitmix64(counter));
  // 53 random bits, shifted into (0, 1).
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal(std::uint64_t counter) const {
  double u1 = uniform(2 * counter);
  double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace scalelaw::rng
