#pragma once

// Seeded, reproducible Monte Carlo verification of every coverage claim.
// Replicates are addressed by a counter-based stream, so results are
// bitwise-identical for a given (seed, n, point) regardless of thread
// count or kernel backend.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oneobs/calibrate.hpp"
#include "oneobs/family.hpp"

namespace oneobs {

// ---------------------------------------------------------------- inputs

/// Compact-support distribution: signed atoms plus uniform-magnitude
/// segments with independent random sign. Selection probabilities must sum
/// to 1.
struct CompactDist {
  struct Atom {
    double x = 0.0;
    double prob = 0.0;
  };
  struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    double prob = 0.0;
  };
  std::vector<Atom> atoms;
  std::vector<Segment> segments;

  double mean() const;
  double second_moment() const;
  double variance() const;
  std::string describe() const;
};

/// Equal-weight atoms at {+a, -a, +b, -b} (weight_a on magnitude a).
CompactDist make_two_point(double a, double b, double weight_a = 0.5);
/// |X| uniform on [a, b], sign symmetric.
CompactDist make_uniform_magnitude(double a, double b);

struct CovarianceSpec {
  enum class Kind { Identity, Diagonal, Dense };
  Kind kind = Kind::Identity;
  std::vector<double> diag;   // Diagonal: p variances
  std::vector<double> dense;  // Dense: p*p covariance, row-major
  std::string text = "identity";
};

/// "identity" | "diag:v1,...,vp" | "rotdiag:v1,...,vp:seed" (a seeded random
/// rotation of the given diagonal).
CovarianceSpec parse_covariance_spec(const std::string& spec, int p);
CovarianceSpec make_rotated_diag(const std::vector<double>& diag, uint64_t seed);

/// One evaluation point of a coverage simulation.
struct ParamPoint {
  enum class Kind { Univariate, Multivariate, Compact };
  Kind kind = Kind::Univariate;

  // Univariate: X = mu + sigma Z, lambda = mu/sigma.
  double mu = 0.0;
  double sigma = 1.0;

  // Multivariate: mean vector and covariance.
  std::vector<double> nu;
  CovarianceSpec cov;

  // Compact-support rules.
  CompactDist dist;

  double lambda() const { return mu / sigma; }
  std::string describe() const;

  static ParamPoint univariate(double mu, double sigma = 1.0);
  static ParamPoint multivariate(std::vector<double> nu, CovarianceSpec cov);
  static ParamPoint compact(CompactDist dist);
};

// --------------------------------------------------------------- reports

struct CoverageCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // slack in the inequality; negative = failed
};

struct MonteCarloReport {
  IntervalRule rule;
  ParamPoint point;
  uint64_t n_reps = 0;
  uint64_t hits = 0;
  double coverage_hat = 0.0;
  double std_error = 0.0;
  uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::optional<double> analytic_coverage;
  std::vector<CoverageCheck> checks;

  bool all_checks_pass() const;
};

struct ScanReport {
  IntervalRule rule;
  std::vector<MonteCarloReport> per_point;
  double empirical_infimum = 0.0;
  size_t argmin_index = 0;
  std::optional<double> analytic_infimum;
  uint64_t seed = 0;
  std::vector<CoverageCheck> checks;

  bool all_checks_pass() const;
};

struct MixtureCheckReport {
  int df = 0;
  double noncentrality = 0.0;
  double quantile = 0.0;
  uint64_t n_reps = 0;
  double direct_hat = 0.0;
  double mixture_hat = 0.0;
  double direct_se = 0.0;
  double mixture_se = 0.0;
  double combined_se = 0.0;
  uint64_t seed = 0;
  bool agree = false;  // |direct - mixture| <= 4 * combined_se
};

struct McOptions {
  int threads = 0;  // 0: ONEOBS_THREADS env var, else hardware up to 8
};

// ------------------------------------------------------------ operations

/// Empirical coverage of `rule` at `point` from n replicates. Checks
/// attached to the report: agreement with the analytic coverage within
/// 4 SE where a formula exists, and the 1 - alpha - 3 SE bound for
/// bound-based rules. Tabulated families must be passed in (builtin names
/// resolve internally) and are sampled on the scalar path by CDF inversion.
MonteCarloReport simulate_coverage(const IntervalRule& rule, const ParamPoint& point,
                                   uint64_t n, uint64_t seed, const McOptions& opts = {},
                                   const ScaledLocationFamily* family = nullptr);

/// simulate_coverage over a grid with per-point derived seeds.
ScanReport scan_infimum(const IntervalRule& rule, const std::vector<ParamPoint>& grid,
                        uint64_t n_per_point, uint64_t seed, const McOptions& opts = {},
                        const ScaledLocationFamily* family = nullptr);

/// Compact-support rule against an adversarial distribution supported on
/// {a <= |x| <= b}; sigma^2 is computed exactly from the spec.
MonteCarloReport simulate_compact(const IntervalRule& rule, const CompactDist& dist,
                                  uint64_t n, uint64_t seed, const McOptions& opts = {});

/// Multivariate mean rule at mean `nu`, covariance `cov`, with c from
/// calibrate_multivariate(alpha, p, m).
MonteCarloReport simulate_multivariate(double alpha, int p, int m,
                                       const std::vector<double>& nu,
                                       const CovarianceSpec& cov, uint64_t n, uint64_t seed,
                                       const McOptions& opts = {});

/// Estimates P(chi'^2_{df}(noncentrality) <= quantile) two ways: direct
/// sums of squared shifted normals, and the Poisson-mixture representation
/// chi^2_{df + 2K} with K ~ Poisson(noncentrality/2). The two samplers are
/// each other's oracle.
MixtureCheckReport noncentral_chisq_mixture_check(int df, double noncentrality,
                                                  double quantile, uint64_t n, uint64_t seed,
                                                  const McOptions& opts = {});

/// P(X^2/sigma^2 >= c^2) across lambda = mu/sigma: must dominate the
/// central value P(Z^2 >= c^2) and be nondecreasing in |lambda| up to MC
/// noise (the monotone-likelihood-ratio property of the noncentral
/// chi-square).
ScanReport verify_mlr_inequality(double c, const std::vector<double>& lambda_grid,
                                 uint64_t n, uint64_t seed, const McOptions& opts = {});

}  // namespace oneobs
