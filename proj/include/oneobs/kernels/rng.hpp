#pragma once

// Counter-based uniform stream built on the SplitMix64 output function
// (Steele-Lea-Flood splittable generators; Vigna's mix constants).
//
// The value at position `pos` of the stream keyed by `key` equals the
// (pos+1)-th output of a sequential splitmix64 engine seeded with `key`, so
// any partition of the position space over lanes, threads or machines
// reproduces the same draws. Simulations address positions as
// (replicate << 32) | draw, which keeps every replicate a pure function of
// (key, replicate) regardless of how work is chunked.

#include <cstdint>

#include "oneobs/kernels/batch.hpp"

namespace oneobs::kernels {

inline constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;
inline constexpr uint64_t kMixA = 0xBF58476D1CE4E5B9ull;
inline constexpr uint64_t kMixB = 0x94D049BB133111EBull;

template <class U>
inline U splitmix_mix(U z) {
  z = (z ^ shr(z, 30)) * U::broadcast(kMixA);
  z = (z ^ shr(z, 27)) * U::broadcast(kMixB);
  return z ^ shr(z, 31);
}

inline uint64_t splitmix_mix_u64(uint64_t z) { return splitmix_mix(ScalarUVec{z}).v; }

template <class U>
inline U stream_bits(uint64_t key, U pos) {
  return splitmix_mix((pos + U::broadcast(1)) * U::broadcast(kGoldenGamma) +
                      U::broadcast(key));
}

// Uniform in (0,1): 52 random bits on the lattice (k + 1/2) * 2^-52, so 0,
// 1/2 and 1 are never produced and the normal quantile below stays finite.
template <class U>
inline auto stream_u01(uint64_t key, U pos) {
  auto v = u64_to_f64_small(shr(stream_bits(key, pos), 12));
  using V = decltype(v);
  return (v + V::broadcast(0.5)) * V::broadcast(0x1.0p-52);
}

inline double stream_u01_at(uint64_t key, uint64_t pos) {
  return stream_u01(key, ScalarUVec{pos}).v;
}

// Position layout used by all simulations.
inline uint64_t draw_position(uint64_t replicate, uint32_t draw) {
  return (replicate << 32) | draw;
}

// Stream key for a (seed, point) pair; point 0 is the default stream.
inline uint64_t derive_stream_key(uint64_t seed, uint64_t point_index = 0) {
  uint64_t s = splitmix_mix_u64(seed + kGoldenGamma);
  return splitmix_mix_u64(s ^ ((point_index + 1) * kGoldenGamma));
}

}  // namespace oneobs::kernels
