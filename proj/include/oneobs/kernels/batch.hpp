#pragma once

// Fixed-width lane types for the sampling and event-count kernels.
//
// Every helper below maps to exactly one IEEE-754 double operation (or an
// exact bit manipulation), so a kernel template instantiated at width 1 and
// at vector width computes bit-identical lane values. ScalarVec is the
// reference implementation; AvxVec is the AVX2+FMA variant selected at
// runtime by the dispatcher. Divisions, square roots and fused multiply-adds
// are correctly rounded on both paths, which is what makes the
// scalar-vs-SIMD equivalence tests exact rather than approximate.

#include <bit>
#include <cmath>
#include <cstdint>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define ONEOBS_BATCH_HAS_AVX2 1
#endif

namespace oneobs::kernels {

// ----------------------------------------------------------------- scalar

struct ScalarMask {
  bool m;
};

inline ScalarMask mask_and(ScalarMask a, ScalarMask b) { return {a.m && b.m}; }
inline ScalarMask mask_or(ScalarMask a, ScalarMask b) { return {a.m || b.m}; }
// (~a) & b
inline ScalarMask mask_andnot(ScalarMask a, ScalarMask b) { return {!a.m && b.m}; }
inline int mask_count(ScalarMask a) { return a.m ? 1 : 0; }

struct ScalarUVec {
  uint64_t v;
  static constexpr int width = 1;
  static ScalarUVec broadcast(uint64_t x) { return {x}; }
  static ScalarUVec iota(uint64_t base) { return {base}; }
};

inline ScalarUVec operator+(ScalarUVec a, ScalarUVec b) { return {a.v + b.v}; }
inline ScalarUVec operator*(ScalarUVec a, ScalarUVec b) { return {a.v * b.v}; }
inline ScalarUVec operator^(ScalarUVec a, ScalarUVec b) { return {a.v ^ b.v}; }
inline ScalarUVec operator&(ScalarUVec a, ScalarUVec b) { return {a.v & b.v}; }
inline ScalarUVec operator|(ScalarUVec a, ScalarUVec b) { return {a.v | b.v}; }
inline ScalarUVec shr(ScalarUVec a, int s) { return {a.v >> s}; }
inline ScalarUVec shl(ScalarUVec a, int s) { return {a.v << s}; }

struct ScalarVec {
  double v;
  using uvec = ScalarUVec;
  using mask = ScalarMask;
  static constexpr int width = 1;
  static ScalarVec broadcast(double x) { return {x}; }
  static ScalarVec load(const double* p) { return {*p}; }
  void store(double* p) const { *p = v; }
};

inline ScalarVec operator+(ScalarVec a, ScalarVec b) { return {a.v + b.v}; }
inline ScalarVec operator-(ScalarVec a, ScalarVec b) { return {a.v - b.v}; }
inline ScalarVec operator*(ScalarVec a, ScalarVec b) { return {a.v * b.v}; }
inline ScalarVec operator/(ScalarVec a, ScalarVec b) { return {a.v / b.v}; }
inline ScalarMask operator<(ScalarVec a, ScalarVec b) { return {a.v < b.v}; }
inline ScalarMask operator<=(ScalarVec a, ScalarVec b) { return {a.v <= b.v}; }
inline ScalarMask operator>=(ScalarVec a, ScalarVec b) { return {a.v >= b.v}; }

// Single correctly rounded a*b+c. std::fma stays correctly rounded whether
// or not the target has an fma instruction.
inline ScalarVec fma_(ScalarVec a, ScalarVec b, ScalarVec c) {
  return {std::fma(a.v, b.v, c.v)};
}
inline ScalarVec sqrt_(ScalarVec a) { return {std::sqrt(a.v)}; }
inline ScalarVec abs_(ScalarVec a) { return {std::fabs(a.v)}; }
inline ScalarVec neg_(ScalarVec a) { return {-a.v}; }
inline ScalarVec select(ScalarMask m, ScalarVec a, ScalarVec b) {
  return {m.m ? a.v : b.v};
}

inline ScalarUVec to_bits(ScalarVec a) { return {std::bit_cast<uint64_t>(a.v)}; }
inline ScalarVec from_bits(ScalarUVec a) { return {std::bit_cast<double>(a.v)}; }

// Exact for v < 2^52.
inline ScalarVec u64_to_f64_small(ScalarUVec a) {
  return {static_cast<double>(a.v)};
}
// Exact for |k| < 2^51; input lanes hold two's-complement values.
inline ScalarVec i64_to_f64_small(ScalarUVec a) {
  return {static_cast<double>(static_cast<int64_t>(a.v))};
}

// ------------------------------------------------------------------- AVX2

#if ONEOBS_BATCH_HAS_AVX2

struct AvxMask {
  __m256d m;
};

inline AvxMask mask_and(AvxMask a, AvxMask b) { return {_mm256_and_pd(a.m, b.m)}; }
inline AvxMask mask_or(AvxMask a, AvxMask b) { return {_mm256_or_pd(a.m, b.m)}; }
inline AvxMask mask_andnot(AvxMask a, AvxMask b) { return {_mm256_andnot_pd(a.m, b.m)}; }
inline int mask_count(AvxMask a) {
  return __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(a.m)));
}

struct AvxUVec {
  __m256i v;
  static constexpr int width = 4;
  static AvxUVec broadcast(uint64_t x) {
    return {_mm256_set1_epi64x(static_cast<long long>(x))};
  }
  static AvxUVec iota(uint64_t base) {
    const __m256i step = _mm256_setr_epi64x(0, 1, 2, 3);
    return {_mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(base)), step)};
  }
};

inline AvxUVec operator+(AvxUVec a, AvxUVec b) { return {_mm256_add_epi64(a.v, b.v)}; }
// 64x64 -> low 64 product from 32-bit pieces; AVX2 has no native mullo_epi64.
inline AvxUVec operator*(AvxUVec a, AvxUVec b) {
  __m256i lolo = _mm256_mul_epu32(a.v, b.v);
  __m256i ahi = _mm256_srli_epi64(a.v, 32);
  __m256i bhi = _mm256_srli_epi64(b.v, 32);
  __m256i cross =
      _mm256_add_epi64(_mm256_mul_epu32(ahi, b.v), _mm256_mul_epu32(a.v, bhi));
  return {_mm256_add_epi64(lolo, _mm256_slli_epi64(cross, 32))};
}
inline AvxUVec operator^(AvxUVec a, AvxUVec b) { return {_mm256_xor_si256(a.v, b.v)}; }
inline AvxUVec operator&(AvxUVec a, AvxUVec b) { return {_mm256_and_si256(a.v, b.v)}; }
inline AvxUVec operator|(AvxUVec a, AvxUVec b) { return {_mm256_or_si256(a.v, b.v)}; }
inline AvxUVec shr(AvxUVec a, int s) { return {_mm256_srli_epi64(a.v, s)}; }
inline AvxUVec shl(AvxUVec a, int s) { return {_mm256_slli_epi64(a.v, s)}; }

struct AvxVec {
  __m256d v;
  using uvec = AvxUVec;
  using mask = AvxMask;
  static constexpr int width = 4;
  static AvxVec broadcast(double x) { return {_mm256_set1_pd(x)}; }
  static AvxVec load(const double* p) { return {_mm256_loadu_pd(p)}; }
  void store(double* p) const { _mm256_storeu_pd(p, v); }
};

inline AvxVec operator+(AvxVec a, AvxVec b) { return {_mm256_add_pd(a.v, b.v)}; }
inline AvxVec operator-(AvxVec a, AvxVec b) { return {_mm256_sub_pd(a.v, b.v)}; }
inline AvxVec operator*(AvxVec a, AvxVec b) { return {_mm256_mul_pd(a.v, b.v)}; }
inline AvxVec operator/(AvxVec a, AvxVec b) { return {_mm256_div_pd(a.v, b.v)}; }
inline AvxMask operator<(AvxVec a, AvxVec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ)}; }
inline AvxMask operator<=(AvxVec a, AvxVec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ)}; }
inline AvxMask operator>=(AvxVec a, AvxVec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ)}; }

inline AvxVec fma_(AvxVec a, AvxVec b, AvxVec c) {
  return {_mm256_fmadd_pd(a.v, b.v, c.v)};
}
inline AvxVec sqrt_(AvxVec a) { return {_mm256_sqrt_pd(a.v)}; }
inline AvxVec abs_(AvxVec a) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
  return {_mm256_and_pd(a.v, mask)};
}
inline AvxVec neg_(AvxVec a) {
  const __m256d sign = _mm256_castsi256_pd(_mm256_set1_epi64x(INT64_MIN));
  return {_mm256_xor_pd(a.v, sign)};
}
inline AvxVec select(AvxMask m, AvxVec a, AvxVec b) {
  return {_mm256_blendv_pd(b.v, a.v, m.m)};
}

inline AvxUVec to_bits(AvxVec a) { return {_mm256_castpd_si256(a.v)}; }
inline AvxVec from_bits(AvxUVec a) { return {_mm256_castsi256_pd(a.v)}; }

inline AvxVec u64_to_f64_small(AvxUVec a) {
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);  // 2^52
  __m256d d = _mm256_castsi256_pd(_mm256_or_si256(a.v, magic));
  return {_mm256_sub_pd(d, _mm256_set1_pd(0x1.0p52))};
}
inline AvxVec i64_to_f64_small(AvxUVec a) {
  const __m256i magic = _mm256_set1_epi64x(0x4338000000000000ll);  // 1.5 * 2^52
  __m256d d = _mm256_castsi256_pd(_mm256_add_epi64(a.v, magic));
  return {_mm256_sub_pd(d, _mm256_set1_pd(0x1.8p52))};
}

#endif  // ONEOBS_BATCH_HAS_AVX2

}  // namespace oneobs::kernels
