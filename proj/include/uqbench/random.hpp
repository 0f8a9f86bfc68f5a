#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace uqbench::random {

// Stateless counter-based generator: every draw is a pure function of
// (seed, stream, i, j, k), so parallel evaluation order never changes the
// numbers produced.

inline std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t Hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                          std::uint64_t j = 0, std::uint64_t k = 0, std::uint64_t lane = 0) {
  constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t h = Mix64(seed + kGolden);
  for (std::uint64_t word : {stream, i, j, k, lane}) h = Mix64(h ^ (word + kGolden + (h << 6) + (h >> 2)));
  return h;
}

// Uniform in the open interval (0, 1).
inline double ToOpenUnit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline double Uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                      std::uint64_t j = 0, std::uint64_t k = 0) {
  return ToOpenUnit(Hash(seed, stream, i, j, k, 0));
}

// Standard normal via Box-Muller on two independent lanes of the same key.
inline double StandardNormal(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                             std::uint64_t j = 0, std::uint64_t k = 0) {
  const double u1 = ToOpenUnit(Hash(seed, stream, i, j, k, 1));
  const double u2 = ToOpenUnit(Hash(seed, stream, i, j, k, 2));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Stream tags keep unrelated consumers of one seed apart.
enum Stream : std::uint64_t {
  kHetLoss = 1,
  kHetMembers = 2,
  kSynthLatent = 10,
  kSynthLabel = 11,
  kSynthOod = 12,
  kSynthCoupling = 13,
  kSynthMember = 14,
};

}  // namespace uqbench::random
