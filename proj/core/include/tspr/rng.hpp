#pragma once

#include <cstdint>
#include <random>

#include "tspr/types.hpp"

namespace tspr::rng {

// splitmix64 finalizer; decorrelates nearby seeds.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Substream tags: every consumer of randomness draws from its own stream so
// per-frame and per-level draws do not depend on generation order.
enum class Stream : std::uint64_t {
  kGaussian = 1,
  kCdpMask = 2,
  kFrameInit = 3,
  kSubspaceInit = 4,
  kSynth = 5,
};

inline std::uint64_t derive(std::uint64_t seed, Stream tag, std::uint64_t a = 0,
                            std::uint64_t b = 0) {
  std::uint64_t s = mix(seed);
  s = mix(s ^ static_cast<std::uint64_t>(tag));
  s = mix(s ^ a);
  return mix(s ^ b);
}

inline std::mt19937_64 substream(std::uint64_t seed, Stream tag, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
  return std::mt19937_64(derive(seed, tag, a, b));
}

// N(0, 1) entries.
inline RVec real_gaussian(Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  RVec v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

// CN(0, 1) entries: real and imaginary parts N(0, 1/2).
inline Vec complex_gaussian(Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(0.0, std::sqrt(0.5));
  Vec v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = dist(gen);
    const double im = dist(gen);
    v[i] = Cx(re, im);
  }
  return v;
}

inline Mat complex_gaussian_matrix(Index rows, Index cols, std::mt19937_64& gen) {
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j) m.col(j) = complex_gaussian(rows, gen);
  return m;
}

}  // namespace tspr::rng
