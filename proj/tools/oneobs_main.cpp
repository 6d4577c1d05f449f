// oneobs: calibrate and verify single-observation confidence intervals.
//
// Subcommands: calibrate, curve, verify, scan, selftest. Output is JSON
// (default) or CSV, to stdout or --output. Every command is deterministic
// given its flags and seed. Exit codes: 0 success, 2 infeasible or domain
// error, 3 verification check failure, 64 usage or format error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oneobs/calibrate.hpp"
#include "oneobs/coverage.hpp"
#include "oneobs/errors.hpp"
#include "oneobs/family.hpp"
#include "oneobs/kernels/dispatch.hpp"
#include "oneobs/montecarlo.hpp"
#include "oneobs/normal.hpp"
#include "oneobs/report_json.hpp"

namespace {

using oneobs::jsonio::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitVerifyFail = 3;
constexpr int kExitUsage = 64;

struct CommonOpts {
  uint64_t seed = 42;
  std::string format = "json";
  std::string output;
  int threads = 0;
  std::string kernel = "auto";
};

uint64_t default_seed() {
  if (const char* e = std::getenv("ONEOBS_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(e, &end, 10);
    if (end != e && *end == '\0') return static_cast<uint64_t>(v);
  }
  return 42;
}

void add_common(CLI::App* cmd, CommonOpts& common) {
  cmd->add_option("--seed", common.seed, "Random seed (default: ONEOBS_SEED env or 42)");
  cmd->add_option("--format", common.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--output", common.output, "Write output to this path instead of stdout");
  cmd->add_option("--threads", common.threads, "Worker threads (0 = auto)");
  cmd->add_option("--kernel", common.kernel, "Kernel backend: auto, scalar, avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2", "simd"}));
}

void apply_kernel_choice(const std::string& kernel) {
  using oneobs::kernels::Backend;
  if (kernel == "scalar")
    oneobs::kernels::set_backend(Backend::Scalar);
  else if (kernel == "avx2" || kernel == "simd")
    oneobs::kernels::set_backend(Backend::Simd);
  else
    oneobs::kernels::set_backend(Backend::Auto);
}

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(output_path);
  if (!out) throw oneobs::format_error("cannot open output path '" + output_path + "'");
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

std::vector<double> parse_grid(const std::string& spec) {
  // "start:stop:step", inclusive endpoints, final point clamped to stop.
  double start = 0.0, stop = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !is.eof())
    throw oneobs::format_error("grid spec must be start:stop:step, got '" + spec + "'");
  if (!(step > 0.0) || stop < start)
    throw oneobs::format_error("grid spec needs step > 0 and stop >= start");
  std::vector<double> grid;
  double span = stop - start;
  auto count = static_cast<size_t>(std::floor(span / step + 1e-9)) + 1;
  grid.reserve(count + 1);
  for (size_t i = 0; i < count; ++i) {
    double v = start + static_cast<double>(i) * step;
    grid.push_back(std::min(v, stop));
  }
  if (grid.back() < stop - 1e-12 * std::max(1.0, std::fabs(stop))) grid.push_back(stop);
  return grid;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

oneobs::CompactDist make_compact_dist(const std::string& dist, double a, double b) {
  if (dist == "two-point" || dist == "twopoint") return oneobs::make_two_point(a, b);
  if (dist == "uniform") return oneobs::make_uniform_magnitude(a, b);
  if (dist.rfind("atoms:", 0) == 0) {
    // atoms:x1:p1,x2:p2,...
    oneobs::CompactDist d;
    std::istringstream is(dist.substr(6));
    std::string tok;
    while (std::getline(is, tok, ',')) {
      auto sep = tok.find(':');
      if (sep == std::string::npos)
        throw oneobs::format_error("atom spec must be x:prob, got '" + tok + "'");
      d.atoms.push_back({std::stod(tok.substr(0, sep)), std::stod(tok.substr(sep + 1))});
    }
    return d;
  }
  throw oneobs::format_error("unknown compact distribution '" + dist +
                             "' (expected two-point, uniform or atoms:x:p,...)");
}

// ----------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string kind;
  double alpha = 0.0;
  std::string family = "normal";
  double a = 0.0, b = 0.0;
  int p = 1, m = 1;
  double split = 0.5;
};

int run_calibrate(const CalibrateArgs& args, const CommonOpts& common) {
  ordered_json out;
  if (args.kind == "joint") {
    auto family = oneobs::resolve_family(args.family);
    auto [mean, sigma] = oneobs::bonferroni_joint(args.alpha, args.split, family);
    out["mean_rule"] = oneobs::jsonio::to_json(mean);
    out["sigma_rule"] = oneobs::jsonio::to_json(sigma);
    out["joint_confidence_at_least"] = 1.0 - args.alpha;
  } else {
    oneobs::RuleKind kind = oneobs::rule_kind_from_name(args.kind);
    oneobs::CalibrationResult result;
    switch (kind) {
      case oneobs::RuleKind::MeanAR:
      case oneobs::RuleKind::MeanStein: {
        auto family = oneobs::resolve_family(args.family);
        result = oneobs::calibrate_mean(args.alpha, family, kind);
        break;
      }
      case oneobs::RuleKind::SigmaNormal:
        result = oneobs::calibrate_sigma_normal(args.alpha);
        break;
      case oneobs::RuleKind::SigmaGeneral: {
        auto family = oneobs::resolve_family(args.family);
        result = oneobs::calibrate_sigma_general(args.alpha, family);
        break;
      }
      case oneobs::RuleKind::SigmaCompact:
        result = oneobs::calibrate_sigma_compact(args.alpha, args.a, args.b);
        break;
      case oneobs::RuleKind::MeanMultivariate:
        result = oneobs::calibrate_multivariate(args.alpha, args.p, args.m);
        break;
    }
    out = oneobs::jsonio::to_json(result);
  }

  if (common.format == "csv") {
    std::ostringstream csv;
    if (args.kind == "joint") {
      csv << "rule,c,alpha\n";
      csv << "mean," << csv_number(out["mean_rule"]["rule"]["c"].get<double>()) << ","
          << csv_number(out["mean_rule"]["rule"]["alpha"].get<double>()) << "\n";
      csv << "sigma," << csv_number(out["sigma_rule"]["rule"]["c"].get<double>()) << ","
          << csv_number(out["sigma_rule"]["rule"]["alpha"].get<double>()) << "\n";
    } else {
      csv << "kind,alpha,c,achieved_inf_coverage\n";
      csv << out["rule"]["kind"].get<std::string>() << "," << csv_number(args.alpha) << ","
          << csv_number(out["rule"]["c"].get<double>()) << ","
          << csv_number(out["achieved_inf_coverage"].get<double>()) << "\n";
    }
    emit(csv.str(), common.output);
  } else {
    emit(out.dump(2), common.output);
  }
  return kExitOk;
}

// --------------------------------------------------------------------- curve

struct CurveArgs {
  std::string kind;
  std::string family = "normal";
  double c = 0.0;
  std::string grid;
};

int run_curve(const CurveArgs& args, const CommonOpts& common) {
  oneobs::RuleKind kind = oneobs::rule_kind_from_name(args.kind);
  auto family = oneobs::resolve_family(args.family);
  auto grid = parse_grid(args.grid);

  oneobs::CoverageCurve curve;
  curve.family = family.name;
  curve.kind = kind;
  curve.c = args.c;
  curve.points.reserve(grid.size());

  switch (kind) {
    case oneobs::RuleKind::MeanAR: {
      for (double l : grid)
        curve.points.emplace_back(l, oneobs::coverage_mean_general(family, l, args.c));
      auto root = oneobs::theta_root(family, args.c);
      curve.has_analytic_min = true;
      curve.analytic_min_lambda = root.theta;
      curve.analytic_min_coverage = oneobs::psi(family, args.c);
      break;
    }
    case oneobs::RuleKind::MeanStein: {
      if (family.sample_model != oneobs::SampleModel::Normal)
        throw oneobs::domain_error(
            "curve --kind mean-stein has a closed form only for the normal family");
      for (double l : grid)
        curve.points.emplace_back(l, oneobs::coverage_mean_stein(l, args.c));
      double lstar = oneobs::critical_lambda_stein(args.c);
      curve.has_analytic_min = true;
      curve.analytic_min_lambda = lstar;
      curve.analytic_min_coverage = oneobs::coverage_mean_stein(lstar, args.c);
      break;
    }
    case oneobs::RuleKind::SigmaNormal:
    case oneobs::RuleKind::SigmaGeneral: {
      for (double l : grid)
        curve.points.emplace_back(l, 1.0 - oneobs::sigma_coverage(family, l, args.c));
      curve.has_analytic_min = true;
      curve.analytic_min_lambda = 0.0;
      curve.analytic_min_coverage = 1.0 - oneobs::sigma_coverage(family, 0.0, args.c);
      break;
    }
    default:
      throw oneobs::format_error("curve supports mean-ar, mean-stein, sigma-normal, "
                                 "sigma-general");
  }

  if (common.format == "csv") {
    std::ostringstream csv;
    csv << "lambda,coverage\n";
    for (const auto& [l, cov] : curve.points)
      csv << csv_number(l) << "," << csv_number(cov) << "\n";
    emit(csv.str(), common.output);
  } else {
    emit(oneobs::jsonio::to_json(curve).dump(2), common.output);
  }
  return kExitOk;
}

// ------------------------------------------------------------- verify / scan

struct VerifyArgs {
  std::string kind;
  double alpha = 0.0;
  std::string family = "normal";
  double mu = 0.0;
  std::string sigma = "1";  // univariate scale, or covariance spec
  std::optional<double> lambda;
  uint64_t reps = 1000000;
  double a = 0.0, b = 0.0;
  std::string dist = "two-point";
  int p = 1, m = 1;
  double nu_norm = 0.0;
  std::string grid;  // scan only
};

oneobs::IntervalRule calibrated_rule(const VerifyArgs& args,
                                     const oneobs::ScaledLocationFamily* family) {
  oneobs::RuleKind kind = oneobs::rule_kind_from_name(args.kind);
  switch (kind) {
    case oneobs::RuleKind::MeanAR:
    case oneobs::RuleKind::MeanStein:
      return oneobs::calibrate_mean(args.alpha, *family, kind).rule;
    case oneobs::RuleKind::SigmaNormal:
      return oneobs::calibrate_sigma_normal(args.alpha).rule;
    case oneobs::RuleKind::SigmaGeneral:
      return oneobs::calibrate_sigma_general(args.alpha, *family).rule;
    case oneobs::RuleKind::SigmaCompact:
      return oneobs::calibrate_sigma_compact(args.alpha, args.a, args.b).rule;
    case oneobs::RuleKind::MeanMultivariate:
      return oneobs::calibrate_multivariate(args.alpha, args.p, args.m).rule;
  }
  throw oneobs::configuration_error("unreachable rule kind");
}

std::vector<double> direction_vector(int p) {
  // Fixed non-axis-aligned direction (1, 2, ..., p)/norm.
  std::vector<double> dir(static_cast<size_t>(p));
  double norm2 = 0.0;
  for (int i = 0; i < p; ++i) {
    dir[static_cast<size_t>(i)] = static_cast<double>(i + 1);
    norm2 += dir[static_cast<size_t>(i)] * dir[static_cast<size_t>(i)];
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (double& v : dir) v *= inv;
  return dir;
}

int run_verify_or_scan(const VerifyArgs& args, const CommonOpts& common, bool is_scan) {
  oneobs::RuleKind kind = oneobs::rule_kind_from_name(args.kind);
  oneobs::McOptions opts;
  opts.threads = common.threads;

  std::optional<oneobs::ScaledLocationFamily> family;
  const bool univariate = kind == oneobs::RuleKind::MeanAR ||
                          kind == oneobs::RuleKind::MeanStein ||
                          kind == oneobs::RuleKind::SigmaNormal ||
                          kind == oneobs::RuleKind::SigmaGeneral;
  if (univariate)
    family = oneobs::resolve_family(kind == oneobs::RuleKind::SigmaNormal ? "normal"
                                                                          : args.family);
  oneobs::IntervalRule rule = calibrated_rule(args, family ? &*family : nullptr);

  ordered_json out;
  bool pass = true;

  if (is_scan || !args.grid.empty()) {
    auto grid_values = parse_grid(args.grid);
    std::vector<oneobs::ParamPoint> grid;
    grid.reserve(grid_values.size());
    if (univariate) {
      for (double l : grid_values) grid.push_back(oneobs::ParamPoint::univariate(l, 1.0));
    } else if (kind == oneobs::RuleKind::MeanMultivariate) {
      auto dir = direction_vector(args.p);
      auto cov = oneobs::parse_covariance_spec(args.sigma, args.p);
      for (double r : grid_values) {
        std::vector<double> nu = dir;
        for (double& v : nu) v *= r;
        grid.push_back(oneobs::ParamPoint::multivariate(std::move(nu), cov));
      }
    } else {
      throw oneobs::format_error("scan supports univariate rules (lambda grid) and "
                                 "mean-multivariate (||nu|| grid)");
    }
    auto scan =
        oneobs::scan_infimum(rule, grid, args.reps, common.seed, opts, family ? &*family : nullptr);
    pass = scan.all_checks_pass();
    out = oneobs::jsonio::to_json(scan);
    if (common.format == "csv") {
      std::ostringstream csv;
      csv << "point,coverage_hat,std_error\n";
      for (const auto& r : scan.per_point)
        csv << '"' << r.point.describe() << "\"," << csv_number(r.coverage_hat) << ","
            << csv_number(r.std_error) << "\n";
      emit(csv.str(), common.output);
    } else {
      emit(out.dump(2), common.output);
    }
    return pass ? kExitOk : kExitVerifyFail;
  }

  oneobs::MonteCarloReport report;
  if (univariate) {
    double mu = args.mu;
    double sigma = 1.0;
    try {
      sigma = std::stod(args.sigma);
    } catch (const std::exception&) {
      throw oneobs::format_error("--sigma must be a number for univariate rules");
    }
    if (args.lambda) {
      mu = *args.lambda;
      sigma = 1.0;
    }
    report = oneobs::simulate_coverage(rule, oneobs::ParamPoint::univariate(mu, sigma),
                                       args.reps, common.seed, opts,
                                       family ? &*family : nullptr);
  } else if (kind == oneobs::RuleKind::SigmaCompact) {
    auto dist = make_compact_dist(args.dist, args.a, args.b);
    report = oneobs::simulate_compact(rule, dist, args.reps, common.seed, opts);
  } else {
    auto cov = oneobs::parse_covariance_spec(args.sigma, args.p);
    auto dir = direction_vector(args.p);
    for (double& v : dir) v *= args.nu_norm;
    report = oneobs::simulate_multivariate(args.alpha, args.p, args.m, dir, cov, args.reps,
                                           common.seed, opts);
  }
  pass = report.all_checks_pass();
  out = oneobs::jsonio::to_json(report);

  if (common.format == "csv") {
    std::ostringstream csv;
    csv << "point,coverage_hat,std_error,n_reps,seed\n";
    csv << '"' << report.point.describe() << "\"," << csv_number(report.coverage_hat) << ","
        << csv_number(report.std_error) << "," << report.n_reps << "," << report.seed << "\n";
    emit(csv.str(), common.output);
  } else {
    emit(out.dump(2), common.output);
  }
  return pass ? kExitOk : kExitVerifyFail;
}

// ------------------------------------------------------------------ selftest

int run_selftest(const std::string& family_spec, const CommonOpts& common) {
  struct Item {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Item> items;
  auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    items.push_back({name, pass, detail});
  };
  std::ostringstream detail;

  auto cauchy = oneobs::make_builtin_family("cauchy");
  auto normal = oneobs::make_builtin_family("normal");

  // Cauchy critical point against its closed form sqrt(c^2-1)/c.
  {
    double worst = 0.0;
    for (double c : {1.1, 1.41421356237309515, 2.0, 5.0, 50.0}) {
      double expect = std::sqrt(c * c - 1.0) / c;
      worst = std::max(worst, std::fabs(oneobs::theta_root(cauchy, c).theta - expect));
    }
    detail.str("");
    detail << "worst |theta - sqrt(c^2-1)/c| = " << worst;
    check("cauchy-theta-closed-form", worst <= 1e-8, detail.str());
  }

  // Cauchy infimum coverage at c = sqrt(2) is exactly 3/4; limits at both ends.
  {
    double v = oneobs::psi(cauchy, std::sqrt(2.0));
    double near_one = oneobs::psi(cauchy, 1.0001);
    double large = oneobs::psi(cauchy, 1e4);
    bool pass = std::fabs(v - 0.75) <= 1e-8 && near_one > 0.49 && near_one < 0.51 &&
                large > 0.999;
    detail.str("");
    detail << "psi(sqrt 2) = " << v << ", psi(1.0001) = " << near_one << ", psi(1e4) = " << large;
    check("cauchy-psi-exact-and-limits", pass, detail.str());
  }

  // Stationarity of both normal coverage curves at their critical lambdas.
  {
    double worst_ar = 0.0, worst_stein = 0.0;
    for (double c : {1.2, 1.5, 2.0, 3.0, 5.0, 10.0}) {
      double l1 = oneobs::critical_lambda_ar(c);
      double h1 = 1e-5 * (1.0 + l1);
      worst_ar = std::max(worst_ar,
                          std::fabs(oneobs::coverage_mean_ar(l1 + h1, c) -
                                    oneobs::coverage_mean_ar(l1 - h1, c)) /
                              (2.0 * h1));
      double l2 = oneobs::critical_lambda_stein(c);
      double h2 = 1e-5 * (1.0 + l2);
      worst_stein = std::max(worst_stein,
                             std::fabs(oneobs::coverage_mean_stein(l2 + h2, c) -
                                       oneobs::coverage_mean_stein(l2 - h2, c)) /
                                 (2.0 * h2));
    }
    detail.str("");
    detail << "worst |dP1/dl| = " << worst_ar;
    check("ar-critical-stationarity", worst_ar <= 1e-6, detail.str());
    detail.str("");
    detail << "worst |dP2/dl| = " << worst_stein;
    check("stein-critical-stationarity", worst_stein <= 1e-6, detail.str());
  }

  // The two mean intervals share their minimal coverage.
  {
    double worst = 0.0;
    for (double c : {1.2, 1.5, 2.0, 3.0, 5.0, 10.0}) {
      double p1 = oneobs::coverage_mean_ar(oneobs::critical_lambda_ar(c), c);
      double p2 = oneobs::coverage_mean_stein(oneobs::critical_lambda_stein(c), c);
      worst = std::max(worst, std::fabs(p1 - p2));
    }
    detail.str("");
    detail << "worst |P1* - P2*| = " << worst;
    check("minimal-coverage-equality", worst <= 1e-10, detail.str());
  }

  // Scale-interval constants: general solver vs normal closed form and the
  // Cauchy arctangent closed form.
  {
    double worst = 0.0;
    for (double alpha : {0.01, 0.05, 0.1, 0.5}) {
      double general = oneobs::calibrate_sigma_general(alpha, normal).rule.c;
      double closed = oneobs::std_normal_quantile(0.5 * (1.0 + alpha));
      worst = std::max(worst, std::fabs(general - closed));
      double cauchy_c = oneobs::calibrate_sigma_general(alpha, cauchy).rule.c;
      double cauchy_closed = std::tan(3.14159265358979323846 * alpha / 2.0);
      worst = std::max(worst, std::fabs(cauchy_c - cauchy_closed));
    }
    detail.str("");
    detail << "worst |c - closed form| = " << worst;
    check("sigma-calibration-consistency", worst <= 1e-8, detail.str());
  }

  // Quantile/CDF round trip.
  {
    double worst = 0.0;
    for (double x = -6.0; x <= 6.0; x += 0.25)
      worst = std::max(worst,
                       std::fabs(oneobs::std_normal_quantile(oneobs::std_normal_cdf(x)) - x));
    detail.str("");
    detail << "worst |q(cdf(x)) - x| = " << worst;
    check("normal-round-trip", worst <= 1e-8, detail.str());
  }

  // Optional: tabulated family against the closed-form normal.
  if (!family_spec.empty()) {
    auto table = oneobs::resolve_family(family_spec);
    double worst = 0.0;
    for (double x = -5.0; x <= 5.0; x += 0.05)
      worst = std::max(worst, std::fabs(table.cdf(x) - oneobs::std_normal_cdf(x)));
    detail.str("");
    detail << "worst |F_table - Phi| = " << worst;
    check("table-vs-closed-form", worst <= 1e-5, detail.str());
  }

  bool all_pass = true;
  std::ostringstream text;
  for (const auto& item : items) {
    all_pass = all_pass && item.pass;
    text << (item.pass ? "ok   " : "FAIL ") << item.name << "  (" << item.detail << ")\n";
  }
  text << (all_pass ? "selftest: all " : "selftest: FAILURES among ") << items.size()
       << " items\n";
  emit(text.str(), common.output);
  return all_pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence intervals for mean and scale from a single observation"};
  app.require_subcommand(1);

  CommonOpts common;
  common.seed = default_seed();

  CalibrateArgs cal_args;
  auto* cal = app.add_subcommand("calibrate", "Solve for the interval constant c");
  cal->add_option("--kind", cal_args.kind,
                  "mean-ar | mean-stein | sigma-normal | sigma-general | sigma-compact | "
                  "mean-multivariate | joint")
      ->required();
  cal->add_option("--alpha", cal_args.alpha, "Miss probability, 1 - confidence")->required();
  cal->add_option("--family", cal_args.family, "normal | cauchy | table:<path>");
  cal->add_option("--a", cal_args.a, "Lower support magnitude (sigma-compact)");
  cal->add_option("--b", cal_args.b, "Upper support magnitude (sigma-compact)");
  cal->add_option("--p", cal_args.p, "Dimension (mean-multivariate)");
  cal->add_option("--m", cal_args.m, "Sample size (mean-multivariate)");
  cal->add_option("--split", cal_args.split, "Mean share of alpha (joint)");
  add_common(cal, common);

  CurveArgs curve_args;
  auto* curve = app.add_subcommand("curve", "Coverage as a function of lambda = mu/sigma");
  curve->add_option("--kind", curve_args.kind, "mean-ar | mean-stein | sigma-general")
      ->required();
  curve->add_option("--family", curve_args.family, "normal | cauchy | table:<path>");
  curve->add_option("--c", curve_args.c, "Interval constant")->required();
  curve->add_option("--grid", curve_args.grid, "lambda grid start:stop:step")->required();
  add_common(curve, common);

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Monte Carlo check of one parameter point");
  verify->add_option("--kind", verify_args.kind, "Rule kind")->required();
  verify->add_option("--alpha", verify_args.alpha, "Miss probability")->required();
  verify->add_option("--family", verify_args.family, "normal | cauchy | table:<path>");
  verify->add_option("--mu", verify_args.mu, "True mean (univariate)");
  verify->add_option("--sigma", verify_args.sigma,
                     "True scale (univariate) or covariance spec (multivariate): "
                     "identity | diag:v1,..,vp | rotdiag:v1,..,vp:seed");
  double lambda_opt = 0.0;
  auto* lam_flag =
      verify->add_option("--lambda", lambda_opt, "Shortcut for --mu <l> --sigma 1");
  verify->add_option("--reps", verify_args.reps, "Replicates");
  verify->add_option("--a", verify_args.a, "Lower support magnitude (sigma-compact)");
  verify->add_option("--b", verify_args.b, "Upper support magnitude (sigma-compact)");
  verify->add_option("--dist", verify_args.dist,
                     "Compact distribution: two-point | uniform | atoms:x:p,...");
  verify->add_option("--p", verify_args.p, "Dimension (mean-multivariate)");
  verify->add_option("--m", verify_args.m, "Sample size (mean-multivariate)");
  verify->add_option("--nu-norm", verify_args.nu_norm, "||nu|| (mean-multivariate)");
  add_common(verify, common);

  VerifyArgs scan_args;
  auto* scan = app.add_subcommand("scan", "Monte Carlo worst-case scan over a grid");
  scan->add_option("--kind", scan_args.kind, "Rule kind")->required();
  scan->add_option("--alpha", scan_args.alpha, "Miss probability")->required();
  scan->add_option("--family", scan_args.family, "normal | cauchy | table:<path>");
  scan->add_option("--grid", scan_args.grid,
                   "lambda grid (univariate) or ||nu|| grid (multivariate), start:stop:step")
      ->required();
  scan->add_option("--sigma", scan_args.sigma, "Covariance spec (multivariate)");
  scan->add_option("--reps", scan_args.reps, "Replicates per grid point");
  scan->add_option("--p", scan_args.p, "Dimension (mean-multivariate)");
  scan->add_option("--m", scan_args.m, "Sample size (mean-multivariate)");
  scan->add_option("--a", scan_args.a, "Lower support magnitude (sigma-compact)");
  scan->add_option("--b", scan_args.b, "Upper support magnitude (sigma-compact)");
  add_common(scan, common);

  std::string selftest_family;
  auto* selftest = app.add_subcommand("selftest", "Run the closed-form oracle suite");
  selftest->add_option("--family", selftest_family,
                       "Optional table:<path> sampling the standard normal density");
  add_common(selftest, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    apply_kernel_choice(common.kernel);
    if (cal->parsed()) return run_calibrate(cal_args, common);
    if (curve->parsed()) return run_curve(curve_args, common);
    if (verify->parsed()) {
      if (lam_flag->count() > 0) verify_args.lambda = lambda_opt;
      return run_verify_or_scan(verify_args, common, false);
    }
    if (scan->parsed()) return run_verify_or_scan(scan_args, common, true);
    if (selftest->parsed()) return run_selftest(selftest_family, common);
    std::cerr << "no subcommand\n";
    return kExitUsage;
  } catch (const oneobs::infeasible_alpha_error& e) {
    ordered_json err{{"error", "infeasible-alpha"},
                     {"message", e.what()},
                     {"min_feasible_alpha", e.min_feasible_alpha}};
    std::cerr << err.dump(2) << "\n";
    return kExitDomain;
  } catch (const oneobs::unattainable_confidence_error& e) {
    std::cerr << ordered_json{{"error", "unattainable-confidence"}, {"message", e.what()}}.dump(2)
              << "\n";
    return kExitDomain;
  } catch (const oneobs::assumption_error& e) {
    std::cerr << ordered_json{{"error", "assumption"}, {"message", e.what()}}.dump(2) << "\n";
    return kExitDomain;
  } catch (const oneobs::domain_error& e) {
    std::cerr << ordered_json{{"error", "domain"}, {"message", e.what()}}.dump(2) << "\n";
    return kExitDomain;
  } catch (const oneobs::root_not_found_error& e) {
    std::cerr << ordered_json{{"error", "root-not-found"}, {"message", e.what()}}.dump(2) << "\n";
    return kExitDomain;
  } catch (const oneobs::format_error& e) {
    std::cerr << ordered_json{{"error", "format"}, {"message", e.what()}}.dump(2) << "\n";
    return kExitUsage;
  } catch (const oneobs::data_error& e) {
    std::cerr << ordered_json{{"error", "data"}, {"message", e.what()}}.dump(2) << "\n";
    return kExitUsage;
  } catch (const oneobs::configuration_error& e) {
    std::cerr << ordered_json{{"error", "configuration"}, {"message", e.what()}}.dump(2) << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << ordered_json{{"error", "internal"}, {"message", e.what()}}.dump(2) << "\n";
    return 1;
  }
}
