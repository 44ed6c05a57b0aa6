#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tailsplit {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable seed for stream `index` under `master`; used for chunked sampling
// so results do not depend on how chunks are scheduled.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unit exponential; 1 - uniform01 lies in (0, 1].
inline double unit_exponential(Rng& rng) {
  return -std::log1p(-uniform01(rng));
}

}  // namespace tailsplit
