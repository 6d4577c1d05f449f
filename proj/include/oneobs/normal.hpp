#pragma once

namespace oneobs {

double std_normal_pdf(double x) noexcept;

/// Standard normal CDF, absolute error well below 1e-12.
/// Throws domain_error on non-finite input.
double std_normal_cdf(double x);

/// Inverse standard normal CDF for p in (0,1); the residual measured through
/// std_normal_cdf is below 1e-10 over the whole range. Shares its kernel
/// with the Monte Carlo sampling paths.
double std_normal_quantile(double p);

}  // namespace oneobs
