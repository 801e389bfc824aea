#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Deliberately naive: plain loops over explicit sets, no shared code with
// the library beyond its public types.

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

inline std::uint64_t splitmix_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Bit n of the seeded real: top bit of the (n+1)-th splitmix64 output.
inline int seeded_bit(std::uint64_t seed, std::uint64_t n) {
  std::uint64_t state = seed;
  std::uint64_t out = 0;
  for (std::uint64_t k = 0; k <= n; ++k) out = splitmix_next(state);
  return static_cast<int>(out >> 63);
}

// Largest e-gap at block i of a membership vector, by walking down from the
// block's top until a member shows up and then trying every e.
inline std::optional<unsigned> max_gap(const std::vector<bool>& member, unsigned i) {
  const std::uint64_t lo = std::uint64_t{1} << i, hi = 2 * lo;
  for (unsigned e = 0; e <= i; ++e) {
    const std::uint64_t size = std::uint64_t{1} << (i - e);
    bool all_absent = true;
    for (std::uint64_t n = hi - size; n < hi; ++n) all_absent = all_absent && !member[n];
    if (all_absent) return e;
  }
  return std::nullopt;
}

inline std::uint64_t count_below(const std::vector<bool>& member, std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t k = 0; k < n; ++k) c += member[k] ? 1 : 0;
  return c;
}

inline unsigned valuation(std::uint64_t n) {
  unsigned v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  return v;
}

// m with 2^m < n <= 2^{m+1}, by counting up.
inline unsigned power_strictly_below(std::uint64_t n) {
  unsigned m = 0;
  while ((std::uint64_t{2} << m) < n) ++m;
  return m;
}

}  // namespace oracle
