#include "oneobs/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oneobs/errors.hpp"
#include "oneobs/normal.hpp"
#include "oneobs/rootfind.hpp"

namespace oneobs {

namespace {

void require_c_above_one(double c, const char* who) {
  if (!(c > 1.0))
    throw domain_error(std::string(who) + ": requires c > 1, got c = " + std::to_string(c));
}

}  // namespace

double coverage_mean_ar(double lambda, double c) {
  require_c_above_one(c, "coverage_mean_ar");
  double l = std::fabs(lambda);
  return std_normal_cdf(c / (c + 1.0) * l) + 1.0 - std_normal_cdf(c / (c - 1.0) * l);
}

double coverage_mean_stein(double lambda, double c) {
  require_c_above_one(c, "coverage_mean_stein");
  double l = std::fabs(lambda);
  return std_normal_cdf((c - 1.0) / c * l) + 1.0 - std_normal_cdf((c + 1.0) / c * l);
}

double critical_lambda_ar(double c) {
  require_c_above_one(c, "critical_lambda_ar");
  double log_ratio = std::log1p(2.0 / (c - 1.0));
  return (c * c - 1.0) / (std::sqrt(2.0) * c * std::sqrt(c)) * std::sqrt(log_ratio);
}

double critical_lambda_stein(double c) {
  require_c_above_one(c, "critical_lambda_stein");
  return std::sqrt(0.5 * c * std::log1p(2.0 / (c - 1.0)));
}

ThetaRoot theta_root(const ScaledLocationFamily& family, double c) {
  require_c_above_one(c, "theta_root");
  const double s = c / (c + 1.0);
  const double t = c / (c - 1.0);
  const double log_target = std::log1p(2.0 / (c - 1.0));
  const double inf = std::numeric_limits<double>::infinity();

  // h(theta) = log f0(s theta) - log f0(t theta) - log((c+1)/(c-1)).
  // Outside-support evaluations count as +inf: the outer density dies first,
  // so the root lies below.
  auto h = [&](double theta) {
    double num = family.log_pdf(s * theta);
    double den = family.log_pdf(t * theta);
    if (den == -inf) return inf;
    return num - den - log_target;
  };

  double lo = 1e-8;
  double h_lo = h(lo);
  while (!(h_lo < 0.0) && lo > 1e-300) {
    lo *= 1e-4;
    h_lo = h(lo);
  }
  if (!(h_lo < 0.0))
    throw root_not_found_error("theta_root: no negative residual near theta = 0");

  double hi = 1.0;
  double h_hi = h(hi);
  int doublings = 0;
  while (h_hi < 0.0) {
    if (hi >= 0x1p60)
      throw root_not_found_error(
          "theta_root: no sign change up to 2^60; MLR hypothesis likely violated");
    hi *= 2.0;
    h_hi = h(hi);
    ++doublings;
  }

  // The acceptance tolerance lives on the ratio scale of the defining
  // equation; translate it to the log scale the solver works on.
  double target = (c + 1.0) / (c - 1.0);
  double f_tol = std::min(1e-13, 0.5e-9 / target);
  auto res = find_root_bracketed(h, lo, hi, h_lo, h_hi, 4e-16, f_tol, 300);

  ThetaRoot out;
  out.c = c;
  out.theta = res.x;
  out.iterations = res.iterations + doublings;
  out.bracket_lo = res.lo;
  out.bracket_hi = res.hi;
  out.residual = std::isfinite(res.fx) ? target * std::expm1(res.fx) : res.fx;
  if (!(std::fabs(out.residual) <= 1e-9))
    throw root_not_found_error(
        "theta_root: residual did not converge; assumptions likely violated");
  return out;
}

double psi(const ScaledLocationFamily& family, double c) {
  ThetaRoot root = theta_root(family, c);
  double s = c / (c + 1.0);
  double t = c / (c - 1.0);
  return family.cdf(s * root.theta) + 1.0 - family.cdf(t * root.theta);
}

double coverage_mean_general(const ScaledLocationFamily& family, double theta, double c) {
  require_c_above_one(c, "coverage_mean_general");
  double l = std::fabs(theta);
  return family.cdf(c / (c + 1.0) * l) + 1.0 - family.cdf(c / (c - 1.0) * l);
}

double sigma_coverage(const ScaledLocationFamily& family, double theta, double c) {
  if (!(c > 0.0)) throw domain_error("sigma_coverage: requires c > 0");
  double l = std::fabs(theta);
  return family.cdf(l + c) - family.cdf(l - c);
}

}  // namespace oneobs
