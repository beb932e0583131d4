#ifndef LAYOUTCUT_RANDOM_HPP_
#define LAYOUTCUT_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace layoutcut {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed for item `index` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

// [0, 1) from the top 53 bits of one draw; identical on every standard library.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace layoutcut

#endif  // LAYOUTCUT_RANDOM_HPP_
