#pragma once

// Bracketed scalar root finding: bisection with secant acceleration. The
// bracket never widens, so convergence is guaranteed whenever the caller
// supplies a sign change; the secant step is taken only when it lands
// strictly inside the current bracket.

#include <cmath>
#include <utility>

namespace oneobs {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  double lo = 0.0;
  double hi = 0.0;
};

template <class F>
RootResult find_root_bracketed(F&& f, double lo, double hi, double flo, double fhi,
                               double x_tol_rel, double f_tol, int max_iter = 200) {
  RootResult res;
  if (flo == 0.0) return {lo, 0.0, 0, lo, hi};
  if (fhi == 0.0) return {hi, 0.0, 0, lo, hi};

  double a = lo, b = hi, fa = flo, fb = fhi;
  double x = a, fx = fa;
  for (int it = 0; it < max_iter; ++it) {
    double mid = 0.5 * (a + b);
    double step = mid;
    if (std::isfinite(fa) && std::isfinite(fb) && fb != fa) {
      double secant = b - fb * (b - a) / (fb - fa);
      if (secant > a && secant < b) step = secant;
    }
    // Bracket at machine resolution: keep the endpoint with the smaller
    // residual and stop.
    if (!(step > a && step < b)) {
      bool pick_a = std::isfinite(fa) && (!std::isfinite(fb) || std::fabs(fa) <= std::fabs(fb));
      x = pick_a ? a : b;
      fx = pick_a ? fa : fb;
      break;
    }
    x = step;
    fx = f(x);
    res.iterations = it + 1;
    if (fx == 0.0) break;
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (std::fabs(fx) <= f_tol) break;
    if (b - a <= x_tol_rel * (1.0 + std::fabs(x))) break;
  }
  res.x = x;
  res.fx = fx;
  res.lo = a;
  res.hi = b;
  return res;
}

}  // namespace oneobs
