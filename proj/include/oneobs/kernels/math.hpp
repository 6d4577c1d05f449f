#pragma once

// Width-templated natural log and inverse normal CDF.
//
// log_k is the classic fdlibm kernel (atanh series after reduction to
// [sqrt(2)/2, sqrt(2))), written against the batch types so the scalar and
// SIMD instantiations execute the same IEEE operation sequence and agree
// bit for bit. Accuracy is ~1 ulp over the normal range; arguments must be
// positive, finite and non-subnormal, which the uniform stream guarantees.
//
// normal_icdf is Wichura's AS241 (PPND16) rational approximation, relative
// error below 1e-15. All three regions are evaluated and blended by masks;
// only division, sqrt and log_k beyond polynomial FMAs, so the same
// bit-equality guarantee holds.

#include <cstdint>

#include "oneobs/kernels/batch.hpp"

namespace oneobs::kernels {

namespace detail {

template <class V, int N>
inline V poly(const double (&c)[N], V r) {
  V acc = V::broadcast(c[N - 1]);
  for (int i = N - 2; i >= 0; --i) acc = fma_(acc, r, V::broadcast(c[i]));
  return acc;
}

}  // namespace detail

template <class V>
inline V log_k(V x) {
  using U = typename V::uvec;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  constexpr double kLg1 = 6.666666666666735130e-01;
  constexpr double kLg2 = 3.999999999940941908e-01;
  constexpr double kLg3 = 2.857142874366239149e-01;
  constexpr double kLg4 = 2.222219843214978396e-01;
  constexpr double kLg5 = 1.818357216161805012e-01;
  constexpr double kLg6 = 1.531383769920937332e-01;
  constexpr double kLg7 = 1.479819860511658591e-01;

  U bits = to_bits(x);
  U man = bits & U::broadcast(0x000FFFFFFFFFFFFFull);
  // Round the mantissa split so the reduced argument lands in
  // [sqrt(2)/2, sqrt(2)); 64-bit analogue of fdlibm's (hx + 0x95f64) & 0x100000.
  U wrap = (man + U::broadcast(0x00095F6400000000ull)) & U::broadcast(0x0010000000000000ull);
  U k_u = shr(bits, 52) + U::broadcast(static_cast<uint64_t>(-1023)) + shr(wrap, 52);
  V xr = from_bits(man | (wrap ^ U::broadcast(0x3FF0000000000000ull)));
  V k = i64_to_f64_small(k_u);

  V one = V::broadcast(1.0);
  V f = xr - one;
  V s = f / (V::broadcast(2.0) + f);
  V z = s * s;
  V w = z * z;
  V t1 = w * fma_(w, fma_(w, V::broadcast(kLg6), V::broadcast(kLg4)), V::broadcast(kLg2));
  V t2 = z * fma_(w, fma_(w, fma_(w, V::broadcast(kLg7), V::broadcast(kLg5)), V::broadcast(kLg3)),
                  V::broadcast(kLg1));
  V r = t2 + t1;
  V hfsq = V::broadcast(0.5) * f * f;
  return k * V::broadcast(kLn2Hi) -
         ((hfsq - (s * (hfsq + r) + k * V::broadcast(kLn2Lo))) - f);
}

template <class V>
inline V normal_icdf(V p) {
  // AS241 PPND16 coefficients (Wichura 1988).
  static constexpr double kA[8] = {
      3.3871328727963666080e0,  1.3314166789178437745e2,  1.9715909503065514427e3,
      1.3731693765509461125e4,  4.5921953931549871457e4,  6.7265770927008700853e4,
      3.3430575583588128105e4,  2.5090809287301226727e3};
  static constexpr double kB[8] = {
      1.0,                      4.2313330701600911252e1,  6.8718700749205790830e2,
      5.3941960214247511077e3,  2.1213794301586595867e4,  3.9307895800092710610e4,
      2.8729085735721942674e4,  5.2264952788528545610e3};
  static constexpr double kC[8] = {
      1.42343711074968357734e0,  4.63033784615654529590e0,  5.76949722146069140550e0,
      3.64784832476320460504e0,  1.27045825245236838258e0,  2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double kD[8] = {
      1.0,                       2.05319162663775882187e0,  1.67638483018380384940e0,
      6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9};
  static constexpr double kE[8] = {
      6.65790464350110377720e0,  5.46378491116411436990e0,  1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double kF[8] = {
      1.0,                       5.99832206555887937690e-1, 1.36929880922735805310e-1,
      1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15};

  using M = typename V::mask;
  const V half = V::broadcast(0.5);
  const V zero = V::broadcast(0.0);

  V q = p - half;
  M central = abs_(q) <= V::broadcast(0.425);

  V rc = V::broadcast(0.180625) - q * q;
  V x_central = q * (detail::poly(kA, rc) / detail::poly(kB, rc));

  M lower = q < zero;
  V pm = select(lower, p, V::broadcast(1.0) - p);
  V r = sqrt_(neg_(log_k(pm)));
  M mid = r <= V::broadcast(5.0);
  V rm = r - V::broadcast(1.6);
  V x_mid = detail::poly(kC, rm) / detail::poly(kD, rm);
  V rt = r - V::broadcast(5.0);
  V x_tail = detail::poly(kE, rt) / detail::poly(kF, rt);
  V x_outer = select(mid, x_mid, x_tail);
  x_outer = select(lower, neg_(x_outer), x_outer);

  return select(central, x_central, x_outer);
}

}  // namespace oneobs::kernels
