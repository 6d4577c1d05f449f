#pragma once

// Exact coverage probabilities of the single-observation mean and scale
// intervals, their interior minimizers, and the infimum coverage psi(c).
// Everything here depends on (mu, sigma) only through lambda = mu/sigma and
// is even in lambda; negative arguments are folded silently.

#include "oneobs/family.hpp"

#include <string>
#include <utility>
#include <vector>

namespace oneobs {

/// Coverage of the observation-centered interval (X - c|X|, X + c|X|) for
/// X ~ N(mu, sigma^2): Phi(c/(c+1) l) + 1 - Phi(c/(c-1) l). Requires c > 1.
double coverage_mean_ar(double lambda, double c);

/// Coverage of the origin-centered interval (-c|X|, c|X|):
/// Phi((c-1)/c l) + 1 - Phi((c+1)/c l). Requires c > 1.
double coverage_mean_stein(double lambda, double c);

/// Interior minimizer of coverage_mean_ar over lambda:
/// (c^2-1)/(sqrt(2) c^{3/2}) * sqrt(log((c+1)/(c-1))).
double critical_lambda_ar(double c);

/// Interior minimizer of coverage_mean_stein over lambda:
/// sqrt((c/2) log((c+1)/(c-1))).
double critical_lambda_stein(double c);

struct ThetaRoot {
  double c = 0.0;
  double theta = 0.0;
  double residual = 0.0;  // f0(s theta)/f0(t theta) - (c+1)/(c-1) at the root
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

/// Unique root of f0(c/(c+1) theta) / f0(c/(c-1) theta) = (c+1)/(c-1),
/// the critical point of the general-family coverage curve. Solved in log
/// space (densities underflow long before the ratio does), bracket grown by
/// doubling from [1e-8, 1]; no sign change by 2^60 throws
/// root_not_found_error.
ThetaRoot theta_root(const ScaledLocationFamily& family, double c);

/// Infimum over (mu, sigma) of the coverage of X +- c|X| for the family:
/// F0(c/(c+1) theta(c)) + 1 - F0(c/(c-1) theta(c)).
double psi(const ScaledLocationFamily& family, double c);

/// General-family analogue of coverage_mean_ar:
/// F0(c/(c+1) theta) + 1 - F0(c/(c-1) theta).
double coverage_mean_general(const ScaledLocationFamily& family, double theta, double c);

/// P(|X|/sigma <= c) = F0(theta + c) - F0(theta - c). The scale interval
/// {sigma <= |X|/c} covers with probability 1 minus this value.
double sigma_coverage(const ScaledLocationFamily& family, double theta, double c);

enum class RuleKind;  // defined in calibrate.hpp

struct CoverageCurve {
  std::string family;
  RuleKind kind;
  double c = 0.0;
  std::vector<std::pair<double, double>> points;  // (lambda, coverage)
  bool has_analytic_min = false;
  double analytic_min_lambda = 0.0;
  double analytic_min_coverage = 0.0;
};

}  // namespace oneobs
