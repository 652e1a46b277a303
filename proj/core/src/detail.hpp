#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace fbst::detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t value) noexcept {
  return splitmix64(seed ^ splitmix64(value));
}

// Sum in ascending order so the result does not depend on input order.
inline double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0);
}

inline std::uint64_t hash_doubles(std::uint64_t seed, std::span<const double> values) noexcept {
  std::uint64_t h = splitmix64(seed ^ values.size());
  for (double v : values) h = mix(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

}  // namespace fbst::detail
