#pragma once

#include <cstdint>
#include <random>

namespace mnsbm {

using Rng = std::mt19937_64;

// Purposes a derived stream can serve. Values are part of the
// reproducibility contract; never renumber.
enum class StreamTag : std::uint64_t {
  kInit = 1,
  kEta = 2,
  kEdges = 3,
  kGibbs = 4,
  kHyper = 5,
  kHoldout = 6,
  kGenerate = 7,
  kExperiment = 8,
};

// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based seed derivation: the seed depends only on its coordinates,
// never on how many streams were created before it.
constexpr std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t a = 0,
                                    std::uint64_t b = 0) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  h = mix64(h ^ a);
  return mix64(h ^ b);
}

inline Rng make_stream(std::uint64_t master, StreamTag tag, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  return Rng(derive_seed(master, tag, a, b));
}

}  // namespace mnsbm
