#pragma once

// Adaptive Simpson integration with absolute tolerance and Richardson
// correction. Exact (up to rounding) for piecewise-cubic integrands, which
// is what the tabulated-density CDF construction relies on.

#include <cmath>

namespace oneobs {

namespace detail {

template <class F>
double simpson_recurse(F&& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double err = (left + right - whole) / 15.0;
  if (depth <= 0 || std::fabs(err) <= tol) return left + right + err;
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 40) {
  if (a == b) return 0.0;
  double fa = f(a);
  double fb = f(b);
  double m = 0.5 * (a + b);
  double fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace oneobs
