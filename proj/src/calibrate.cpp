#include "oneobs/calibrate.hpp"

#include <cmath>
#include <sstream>

#include "oneobs/coverage.hpp"
#include "oneobs/errors.hpp"
#include "oneobs/normal.hpp"
#include "oneobs/rootfind.hpp"

namespace oneobs {

const char* rule_kind_name(RuleKind kind) {
  switch (kind) {
    case RuleKind::MeanAR: return "mean-ar";
    case RuleKind::MeanStein: return "mean-stein";
    case RuleKind::SigmaNormal: return "sigma-normal";
    case RuleKind::SigmaGeneral: return "sigma-general";
    case RuleKind::SigmaCompact: return "sigma-compact";
    case RuleKind::MeanMultivariate: return "mean-multivariate";
  }
  return "unknown";
}

RuleKind rule_kind_from_name(const std::string& name) {
  if (name == "mean-ar") return RuleKind::MeanAR;
  if (name == "mean-stein") return RuleKind::MeanStein;
  if (name == "sigma-normal") return RuleKind::SigmaNormal;
  if (name == "sigma-general") return RuleKind::SigmaGeneral;
  if (name == "sigma-compact") return RuleKind::SigmaCompact;
  if (name == "mean-multivariate") return RuleKind::MeanMultivariate;
  throw configuration_error("unknown rule kind '" + name + "'");
}

namespace {

void require_alpha_open_unit(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw domain_error(std::string(who) + ": alpha must lie strictly in (0,1)");
}

}  // namespace

CalibrationResult calibrate_mean(double alpha, const ScaledLocationFamily& family,
                                 RuleKind kind) {
  if (kind != RuleKind::MeanAR && kind != RuleKind::MeanStein)
    throw configuration_error("calibrate_mean expects a mean rule kind");
  require_alpha_open_unit(alpha, "calibrate_mean");
  const double target = 1.0 - alpha;

  double lo = 1.0 + 1e-6;
  double hi = 1e6;
  double psi_lo = psi(family, lo);
  if (!(psi_lo < target)) {
    std::ostringstream msg;
    msg << "calibrate_mean: confidence " << target << " is not attainable; the infimum "
        << "coverage already exceeds it at c = 1 (psi(1+) = " << psi_lo
        << "); mean intervals for this family need alpha < " << 1.0 - psi_lo;
    throw unattainable_confidence_error(msg.str());
  }
  double psi_hi = psi(family, hi);
  if (!(psi_hi >= target)) {
    std::ostringstream msg;
    msg << "calibrate_mean: confidence " << target << " exceeds the attainable range "
        << "(psi(" << hi << ") = " << psi_hi << ")";
    throw unattainable_confidence_error(msg.str());
  }

  auto g = [&](double c) { return psi(family, c) - target; };
  auto res = find_root_bracketed(g, lo, hi, psi_lo - target, psi_hi - target, 1e-13, 1e-10, 300);

  CalibrationResult out;
  out.rule.kind = kind;
  out.rule.c = res.x;
  out.rule.alpha = alpha;
  out.rule.family = family.name;
  out.achieved_inf_coverage = res.fx + target;
  out.residual = res.fx;
  out.iterations = res.iterations;
  out.bracket = {res.lo, res.hi};
  return out;
}

CalibrationResult calibrate_sigma_normal(double alpha) {
  require_alpha_open_unit(alpha, "calibrate_sigma_normal");
  double c = std_normal_quantile(0.5 * (1.0 + alpha));
  CalibrationResult out;
  out.rule.kind = RuleKind::SigmaNormal;
  out.rule.c = c;
  out.rule.alpha = alpha;
  out.rule.family = "normal";
  out.achieved_inf_coverage = 1.0 - alpha;
  out.residual = std_normal_cdf(c) - 0.5 * (1.0 + alpha);
  out.iterations = 0;
  out.bracket = {c, c};
  return out;
}

CalibrationResult calibrate_sigma_general(double alpha, const ScaledLocationFamily& family) {
  require_alpha_open_unit(alpha, "calibrate_sigma_general");
  if (!family.symmetric || !family.strictly_unimodal)
    throw assumption_error(
        "calibrate_sigma_general: family '" + family.name +
        "' is not symmetric and strictly unimodal, which the scale interval requires");

  const double half_alpha = 0.5 * alpha;
  auto g = [&](double c) { return family.cdf(c) - 0.5 - half_alpha; };

  double hi = 1.0;
  double g_hi = g(hi);
  while (g_hi < 0.0) {
    if (hi >= family.support_radius || hi >= 0x1p60) {
      hi = std::min(family.support_radius, 0x1p60);
      g_hi = g(hi);
      break;
    }
    hi = std::min(hi * 2.0, family.support_radius);
    g_hi = g(hi);
  }
  if (g_hi < 0.0)
    throw unattainable_confidence_error(
        "calibrate_sigma_general: F0 never reaches (1+alpha)/2 on the support");

  auto res = find_root_bracketed(g, 0.0, hi, -half_alpha, g_hi, 1e-14, 1e-11, 300);

  CalibrationResult out;
  out.rule.kind = RuleKind::SigmaGeneral;
  out.rule.c = res.x;
  out.rule.alpha = alpha;
  out.rule.family = family.name;
  out.achieved_inf_coverage = 1.0 - alpha;
  out.residual = res.fx;
  out.iterations = res.iterations;
  out.bracket = {res.lo, res.hi};
  return out;
}

CalibrationResult calibrate_sigma_compact(double alpha, double a, double b) {
  require_alpha_open_unit(alpha, "calibrate_sigma_compact");
  if (!(a > 0.0) || !(b >= a))
    throw domain_error("calibrate_sigma_compact: requires 0 < a <= b");
  double k = 2.0 * a * b / (a * a + b * b);  // K = 2 / (b/a + a/b)
  double k2 = k * k;
  double min_alpha = 1.0 - k2;
  if (!(alpha > min_alpha)) {
    std::ostringstream msg;
    msg << "calibrate_sigma_compact: alpha " << alpha << " <= 1 - K^2 = " << min_alpha
        << "; smallest feasible alpha is " << min_alpha;
    throw infeasible_alpha_error(msg.str(), min_alpha);
  }
  // c^2 = 1 - sqrt(1-alpha)/K in cancellation-free form: the numerator is
  // the feasibility margin alpha - (1 - K^2), so c^2 stays positive at the
  // boundary instead of rounding negative.
  double root = std::sqrt(1.0 - alpha);
  double c2 = (alpha - min_alpha) / (k2 + k * root);
  CalibrationResult out;
  out.rule.kind = RuleKind::SigmaCompact;
  out.rule.c = std::sqrt(c2);
  out.rule.alpha = alpha;
  out.rule.compact_bounds = {a, b};
  out.achieved_inf_coverage = 1.0 - alpha;
  out.residual = 0.0;
  out.iterations = 0;
  out.bracket = {out.rule.c, out.rule.c};
  out.min_feasible_alpha = min_alpha;
  return out;
}

CalibrationResult calibrate_multivariate(double alpha, int p, int m) {
  require_alpha_open_unit(alpha, "calibrate_multivariate");
  if (p < 1 || m < 1) throw domain_error("calibrate_multivariate: requires p, m >= 1");
  const double pm = static_cast<double>(p) * static_cast<double>(m);
  double c = 3.85 * std::pow(alpha, -1.0 / pm);
  double a = 1.0 / (1.0 - std::exp(1.0 - 2.0 * 3.14159265358979323846 * std::exp(p / 4.0)));
  double refined = std::sqrt(2.0 * std::exp(2.0) * std::pow(alpha, -2.0 / pm) * a);
  CalibrationResult out;
  out.rule.kind = RuleKind::MeanMultivariate;
  out.rule.c = c;
  out.rule.alpha = alpha;
  out.rule.dims = {p, m};
  out.achieved_inf_coverage = 1.0 - alpha;
  out.residual = 0.0;
  out.iterations = 0;
  out.bracket = {c, c};
  out.refined_c = refined;
  return out;
}

std::pair<CalibrationResult, CalibrationResult> bonferroni_joint(
    double alpha, double split, const ScaledLocationFamily& family) {
  require_alpha_open_unit(alpha, "bonferroni_joint");
  if (!(split > 0.0 && split < 1.0))
    throw domain_error("bonferroni_joint: split must lie strictly in (0,1)");
  double alpha_mean = alpha * split;
  double alpha_sigma = alpha * (1.0 - split);
  CalibrationResult mean = calibrate_mean(alpha_mean, family, RuleKind::MeanAR);
  CalibrationResult sigma = family.name == "normal"
                                ? calibrate_sigma_normal(alpha_sigma)
                                : calibrate_sigma_general(alpha_sigma, family);
  return {std::move(mean), std::move(sigma)};
}

}  // namespace oneobs
