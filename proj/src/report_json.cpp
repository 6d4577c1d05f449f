#include "oneobs/report_json.hpp"

#include "oneobs/errors.hpp"

namespace oneobs::jsonio {

namespace {

const char* formula_for(RuleKind kind) {
  switch (kind) {
    case RuleKind::MeanAR:
      return "interval (X - c|X|, X + c|X|); c solves psi(c) = 1 - alpha with "
             "psi(c) = F0(c/(c+1) theta) + 1 - F0(c/(c-1) theta) at the critical theta(c)";
    case RuleKind::MeanStein:
      return "interval (-c|X|, c|X|); same infimum coverage as the "
             "observation-centered interval, c solves psi(c) = 1 - alpha";
    case RuleKind::SigmaNormal:
      return "interval {sigma <= |X|/c}; c = Phi^-1((1+alpha)/2)";
    case RuleKind::SigmaGeneral:
      return "interval {sigma <= |X|/c}; c solves F0(c) - 1/2 = alpha/2";
    case RuleKind::SigmaCompact:
      return "interval {sigma <= |X|/c}; c^2 = 1 - sqrt(1-alpha)/K with "
             "K = 2ab/(a^2+b^2), feasible iff alpha > 1 - K^2";
    case RuleKind::MeanMultivariate:
      return "set {||mu|| <= c ||X|| / sqrt(m)}; c = 3.85 alpha^(-1/(p m))";
  }
  return "";
}

ordered_json checks_to_json(const std::vector<CoverageCheck>& checks) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
  return arr;
}

std::vector<CoverageCheck> checks_from_json(const ordered_json& arr) {
  std::vector<CoverageCheck> checks;
  for (const auto& c : arr)
    checks.push_back({c.at("name").get<std::string>(), c.at("pass").get<bool>(),
                      c.at("margin").get<double>()});
  return checks;
}

}  // namespace

ordered_json to_json(const IntervalRule& rule) {
  ordered_json j;
  j["kind"] = rule_kind_name(rule.kind);
  j["c"] = rule.c;
  j["alpha"] = rule.alpha;
  if (rule.family) j["family"] = *rule.family;
  if (rule.compact_bounds) {
    j["a"] = rule.compact_bounds->first;
    j["b"] = rule.compact_bounds->second;
  }
  if (rule.dims) {
    j["p"] = rule.dims->first;
    j["m"] = rule.dims->second;
  }
  j["formula"] = formula_for(rule.kind);
  return j;
}

IntervalRule rule_from_json(const ordered_json& j) {
  IntervalRule rule;
  rule.kind = rule_kind_from_name(j.at("kind").get<std::string>());
  rule.c = j.at("c").get<double>();
  rule.alpha = j.at("alpha").get<double>();
  if (j.contains("family")) rule.family = j.at("family").get<std::string>();
  if (j.contains("a")) rule.compact_bounds = {j.at("a").get<double>(), j.at("b").get<double>()};
  if (j.contains("p")) rule.dims = {j.at("p").get<int>(), j.at("m").get<int>()};
  return rule;
}

ordered_json to_json(const CalibrationResult& result) {
  ordered_json j;
  j["rule"] = to_json(result.rule);
  j["achieved_inf_coverage"] = result.achieved_inf_coverage;
  j["residual"] = result.residual;
  j["iterations"] = result.iterations;
  j["bracket"] = {result.bracket.first, result.bracket.second};
  if (result.refined_c) j["refined_c"] = *result.refined_c;
  if (result.min_feasible_alpha) j["min_feasible_alpha"] = *result.min_feasible_alpha;
  return j;
}

CalibrationResult calibration_from_json(const ordered_json& j) {
  CalibrationResult r;
  r.rule = rule_from_json(j.at("rule"));
  r.achieved_inf_coverage = j.at("achieved_inf_coverage").get<double>();
  r.residual = j.at("residual").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.bracket = {j.at("bracket")[0].get<double>(), j.at("bracket")[1].get<double>()};
  if (j.contains("refined_c")) r.refined_c = j.at("refined_c").get<double>();
  if (j.contains("min_feasible_alpha"))
    r.min_feasible_alpha = j.at("min_feasible_alpha").get<double>();
  return r;
}

ordered_json to_json(const ParamPoint& point) {
  ordered_json j;
  switch (point.kind) {
    case ParamPoint::Kind::Univariate:
      j["type"] = "univariate";
      j["mu"] = point.mu;
      j["sigma"] = point.sigma;
      j["lambda"] = point.lambda();
      break;
    case ParamPoint::Kind::Multivariate: {
      j["type"] = "multivariate";
      j["nu"] = point.nu;
      j["cov"] = point.cov.text;
      break;
    }
    case ParamPoint::Kind::Compact: {
      j["type"] = "compact";
      ordered_json atoms = ordered_json::array();
      for (const auto& a : point.dist.atoms) atoms.push_back({{"x", a.x}, {"prob", a.prob}});
      ordered_json segs = ordered_json::array();
      for (const auto& s : point.dist.segments)
        segs.push_back({{"lo", s.lo}, {"hi", s.hi}, {"prob", s.prob}});
      j["atoms"] = atoms;
      j["segments"] = segs;
      break;
    }
  }
  return j;
}

ParamPoint point_from_json(const ordered_json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "univariate")
    return ParamPoint::univariate(j.at("mu").get<double>(), j.at("sigma").get<double>());
  if (type == "multivariate") {
    ParamPoint pt;
    pt.kind = ParamPoint::Kind::Multivariate;
    pt.nu = j.at("nu").get<std::vector<double>>();
    pt.cov.text = j.at("cov").get<std::string>();
    return pt;
  }
  if (type == "compact") {
    CompactDist d;
    for (const auto& a : j.at("atoms"))
      d.atoms.push_back({a.at("x").get<double>(), a.at("prob").get<double>()});
    for (const auto& s : j.at("segments"))
      d.segments.push_back(
          {s.at("lo").get<double>(), s.at("hi").get<double>(), s.at("prob").get<double>()});
    return ParamPoint::compact(std::move(d));
  }
  throw format_error("unknown parameter point type '" + type + "'");
}

ordered_json to_json(const MonteCarloReport& report) {
  ordered_json j;
  j["rule"] = to_json(report.rule);
  j["parameter_point"] = to_json(report.point);
  j["n_reps"] = report.n_reps;
  j["hits"] = report.hits;
  j["coverage_hat"] = report.coverage_hat;
  j["std_error"] = report.std_error;
  j["seed"] = report.seed;
  if (report.analytic_coverage) j["analytic_coverage"] = *report.analytic_coverage;
  j["checks"] = checks_to_json(report.checks);
  j["wall_time_s"] = report.wall_time_s;
  return j;
}

MonteCarloReport report_from_json(const ordered_json& j) {
  MonteCarloReport r;
  r.rule = rule_from_json(j.at("rule"));
  r.point = point_from_json(j.at("parameter_point"));
  r.n_reps = j.at("n_reps").get<uint64_t>();
  r.hits = j.at("hits").get<uint64_t>();
  r.coverage_hat = j.at("coverage_hat").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.seed = j.at("seed").get<uint64_t>();
  if (j.contains("analytic_coverage"))
    r.analytic_coverage = j.at("analytic_coverage").get<double>();
  r.checks = checks_from_json(j.at("checks"));
  r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

ordered_json to_json(const ScanReport& report) {
  ordered_json j;
  j["rule"] = to_json(report.rule);
  ordered_json pts = ordered_json::array();
  for (const auto& r : report.per_point) pts.push_back(to_json(r));
  j["per_point"] = pts;
  j["empirical_infimum"] = report.empirical_infimum;
  j["argmin_index"] = report.argmin_index;
  j["argmin_point"] = to_json(report.per_point.at(report.argmin_index).point);
  if (report.analytic_infimum) j["analytic_infimum"] = *report.analytic_infimum;
  j["seed"] = report.seed;
  j["checks"] = checks_to_json(report.checks);
  return j;
}

ScanReport scan_from_json(const ordered_json& j) {
  ScanReport r;
  r.rule = rule_from_json(j.at("rule"));
  for (const auto& p : j.at("per_point")) r.per_point.push_back(report_from_json(p));
  r.empirical_infimum = j.at("empirical_infimum").get<double>();
  r.argmin_index = j.at("argmin_index").get<size_t>();
  if (j.contains("analytic_infimum"))
    r.analytic_infimum = j.at("analytic_infimum").get<double>();
  r.seed = j.at("seed").get<uint64_t>();
  r.checks = checks_from_json(j.at("checks"));
  return r;
}

ordered_json to_json(const MixtureCheckReport& report) {
  ordered_json j;
  j["df"] = report.df;
  j["noncentrality"] = report.noncentrality;
  j["quantile"] = report.quantile;
  j["n_reps"] = report.n_reps;
  j["direct_hat"] = report.direct_hat;
  j["mixture_hat"] = report.mixture_hat;
  j["direct_se"] = report.direct_se;
  j["mixture_se"] = report.mixture_se;
  j["combined_se"] = report.combined_se;
  j["seed"] = report.seed;
  j["agree"] = report.agree;
  return j;
}

ordered_json to_json(const CoverageCurve& curve) {
  ordered_json j;
  j["family"] = curve.family;
  j["kind"] = rule_kind_name(curve.kind);
  j["c"] = curve.c;
  ordered_json pts = ordered_json::array();
  for (const auto& [l, cov] : curve.points) pts.push_back({l, cov});
  j["points"] = pts;
  if (curve.has_analytic_min) {
    j["analytic_min_lambda"] = curve.analytic_min_lambda;
    j["analytic_min_coverage"] = curve.analytic_min_coverage;
  }
  return j;
}

}  // namespace oneobs::jsonio
