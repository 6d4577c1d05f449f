#pragma once

// Fritsch-Carlson shape-preserving cubic Hermite interpolant. Monotone on
// monotone data segments and never overshoots, so nonnegative density
// tables stay nonnegative.

#include <cstddef>
#include <span>
#include <vector>

namespace oneobs {

class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  /// Evaluate at t; clamps to the endpoint values outside the knot range.
  double operator()(double t) const;

  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::vector<double> x_, y_, slope_;
};

}  // namespace oneobs
