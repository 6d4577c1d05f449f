#include "oneobs/normal.hpp"

#include <cmath>

#include "oneobs/errors.hpp"
#include "oneobs/kernels/batch.hpp"
#include "oneobs/kernels/math.hpp"

namespace oneobs {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kInvSqrt2 = 0.7071067811865475244008444;
}  // namespace

double std_normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw domain_error("std_normal_cdf: non-finite argument");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw domain_error("std_normal_quantile: p must lie strictly in (0,1)");
  return kernels::normal_icdf(kernels::ScalarVec{p}).v;
}

}  // namespace oneobs
