#pragma once

#include <cstdint>
#include <random>

namespace nflsim {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for stream `ordinal` under `master`; streams are independent of the
// order in which they are created.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t ordinal) {
  return splitmix64(splitmix64(master) ^ splitmix64(ordinal + 0x632BE59BD9B4E019ull));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t ordinal) { return Rng(derive_seed(master, ordinal)); }

// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

}  // namespace nflsim
