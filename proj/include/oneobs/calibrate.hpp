#pragma once

// Solve for the interval constant c achieving target confidence 1 - alpha
// for each of the six interval constructions. Mean and general-scale rules
// are exact calibrations (the infimum coverage equals 1 - alpha); the
// compact-support and multivariate rules are bound-based (infimum coverage
// at least 1 - alpha by construction).

#include <optional>
#include <string>
#include <utility>

#include "oneobs/family.hpp"

namespace oneobs {

enum class RuleKind {
  MeanAR,            // (X - c|X|, X + c|X|), observation-centered
  MeanStein,         // (-c|X|, c|X|), origin-centered
  SigmaNormal,       // {sigma <= |X|/c}, X normal, c = Phi^-1((1+alpha)/2)
  SigmaGeneral,      // {sigma <= |X|/c}, symmetric strictly unimodal family
  SigmaCompact,      // {sigma <= |X|/c}, any distribution on a <= |X| <= b
  MeanMultivariate,  // {||mu|| <= c ||X|| / sqrt(m)}, m draws from N_p(mu, Sigma)
};

const char* rule_kind_name(RuleKind kind);
RuleKind rule_kind_from_name(const std::string& name);

struct IntervalRule {
  RuleKind kind = RuleKind::MeanAR;
  double c = 0.0;
  double alpha = 0.0;
  std::optional<std::string> family;                    // mean/sigma rules
  std::optional<std::pair<double, double>> compact_bounds;  // (a, b)
  std::optional<std::pair<int, int>> dims;                  // (p, m)
};

struct CalibrationResult {
  IntervalRule rule;
  double achieved_inf_coverage = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::pair<double, double> bracket{0.0, 0.0};
  std::optional<double> refined_c;           // multivariate diagnostic
  std::optional<double> min_feasible_alpha;  // compact diagnostic
};

/// c solving psi(c) = 1 - alpha for the family. Both mean-interval shapes
/// share the same infimum coverage (it depends only on the length 2c|X|),
/// so the constant is identical; the rule records the requested kind.
/// Requires alpha inside the attainable range of psi, checked at the
/// bracket endpoints (unattainable_confidence_error otherwise).
CalibrationResult calibrate_mean(double alpha, const ScaledLocationFamily& family,
                                 RuleKind kind);

/// Closed form c = Phi^-1((1+alpha)/2) for one normal observation.
CalibrationResult calibrate_sigma_normal(double alpha);

/// c solving F0(c) - 1/2 = alpha/2 for a symmetric strictly unimodal family.
CalibrationResult calibrate_sigma_general(double alpha, const ScaledLocationFamily& family);

/// Distribution-free bound for supports a <= |X| <= b: with
/// K = 2ab/(a^2 + b^2), feasible for alpha > 1 - K^2, and
/// c^2 = 1 - sqrt(1-alpha)/K (evaluated in cancellation-free form).
CalibrationResult calibrate_sigma_compact(double alpha, double a, double b);

/// Multivariate mean rule c = 3.85 alpha^{-1/(p m)}; the sharper constant
/// c^2 = 2 e^2 alpha^{-2/(p m)} a with a = 1/(1 - exp(1 - 2 pi e^{p/4}))
/// is kept as a diagnostic.
CalibrationResult calibrate_multivariate(double alpha, int p, int m);

/// Bonferroni split of alpha across the mean and scale intervals:
/// mean rule at alpha*split, scale rule at alpha*(1-split); the joint
/// rectangle covers with probability at least 1 - alpha.
std::pair<CalibrationResult, CalibrationResult> bonferroni_joint(
    double alpha, double split, const ScaledLocationFamily& family);

}  // namespace oneobs
