#include "oneobs/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "oneobs/coverage.hpp"
#include "oneobs/errors.hpp"
#include "oneobs/kernels/dispatch.hpp"
#include "oneobs/kernels/math.hpp"
#include "oneobs/kernels/rng.hpp"
#include "oneobs/normal.hpp"

namespace oneobs {

namespace {

using kernels::draw_position;  // declared below; see rng.hpp

int resolve_threads(int requested) {
  if (requested > 0) return std::min(requested, 64);
  if (const char* e = std::getenv("ONEOBS_THREADS")) {
    int v = std::atoi(e);
    if (v > 0) return std::min(v, 64);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hc, 1u, 8u));
}

// Runs body(r0, r1) -> hits over contiguous replicate chunks. Counts add
// exactly, so the partition never changes the total.
template <class Body>
uint64_t parallel_hits(uint64_t n, int threads, Body&& body) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 1u << 16) return body(0, n);
  std::vector<uint64_t> part(static_cast<size_t>(threads), 0);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  uint64_t chunk = n / static_cast<uint64_t>(threads);
  for (int t = 0; t < threads; ++t) {
    uint64_t r0 = chunk * static_cast<uint64_t>(t);
    uint64_t r1 = (t + 1 == threads) ? n : r0 + chunk;
    pool.emplace_back([&, t, r0, r1] { part[static_cast<size_t>(t)] = body(r0, r1); });
  }
  for (auto& th : pool) th.join();
  uint64_t total = 0;
  for (uint64_t h : part) total += h;
  return total;
}

double binomial_se(double p_hat, uint64_t n) {
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

// SE floor for pass/fail margins only (the reported std_error stays the
// plain binomial formula): an Agresti-Coull style shrink keeps checks
// meaningful when the empirical rate hits 0 or 1 exactly.
double check_se(uint64_t hits, uint64_t n) {
  double p = (static_cast<double>(hits) + 2.0) / (static_cast<double>(n) + 4.0);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

void require_reps_and_range(uint64_t n) {
  if (n < 1) throw domain_error("simulation needs at least one replicate");
  if (n > (uint64_t(1) << 32))
    throw configuration_error("replicate count exceeds the 2^32 stream budget");
}

double sample_scalar_standard(const ScaledLocationFamily& family, uint64_t key,
                              uint64_t rep) {
  // Generic families sample by CDF inversion on draw 0 of the replicate;
  // matches the quantile contract, not the builtin kernels' streams.
  double u = kernels::stream_u01_at(key, draw_position(rep, 0));
  return family.quantile(u);
}

}  // namespace

// ------------------------------------------------------------ CompactDist

double CompactDist::mean() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.prob * a.x;
  return m;  // segments are sign-symmetric
}

double CompactDist::second_moment() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.prob * a.x * a.x;
  for (const auto& g : segments)
    s += g.prob * (g.lo * g.lo + g.lo * g.hi + g.hi * g.hi) / 3.0;
  return s;
}

double CompactDist::variance() const {
  double m = mean();
  return second_moment() - m * m;
}

std::string CompactDist::describe() const {
  std::ostringstream os;
  os << "compact{";
  bool first = true;
  for (const auto& a : atoms) {
    os << (first ? "" : ",") << "atom(" << a.x << ":" << a.prob << ")";
    first = false;
  }
  for (const auto& g : segments) {
    os << (first ? "" : ",") << "u[" << g.lo << "," << g.hi << "]:" << g.prob;
    first = false;
  }
  os << "}";
  return os.str();
}

CompactDist make_two_point(double a, double b, double weight_a) {
  CompactDist d;
  d.atoms = {{a, weight_a / 2.0},
             {-a, weight_a / 2.0},
             {b, (1.0 - weight_a) / 2.0},
             {-b, (1.0 - weight_a) / 2.0}};
  return d;
}

CompactDist make_uniform_magnitude(double a, double b) {
  CompactDist d;
  d.segments = {{a, b, 1.0}};
  return d;
}

// --------------------------------------------------------- CovarianceSpec

CovarianceSpec make_rotated_diag(const std::vector<double>& diag, uint64_t seed) {
  const int p = static_cast<int>(diag.size());
  uint64_t key = kernels::derive_stream_key(seed, 0xC0Dull);
  // Random Gaussian matrix, Gram-Schmidt to an orthonormal basis R, then
  // Sigma = R D R^T.
  std::vector<std::vector<double>> r(p, std::vector<double>(p));
  uint64_t pos = 0;
  for (auto& row : r)
    for (double& v : row)
      v = kernels::normal_icdf(kernels::ScalarVec{kernels::stream_u01_at(key, pos++)}).v;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < i; ++j) {
      double dot = 0.0;
      for (int k = 0; k < p; ++k) dot += r[i][k] * r[j][k];
      for (int k = 0; k < p; ++k) r[i][k] -= dot * r[j][k];
    }
    double norm = 0.0;
    for (int k = 0; k < p; ++k) norm += r[i][k] * r[i][k];
    norm = std::sqrt(norm);
    for (int k = 0; k < p; ++k) r[i][k] /= norm;
  }
  CovarianceSpec spec;
  spec.kind = CovarianceSpec::Kind::Dense;
  spec.dense.assign(static_cast<size_t>(p) * p, 0.0);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      double v = 0.0;
      for (int k = 0; k < p; ++k) v += r[k][i] * diag[static_cast<size_t>(k)] * r[k][j];
      spec.dense[static_cast<size_t>(i) * p + j] = v;
    }
  std::ostringstream os;
  os << "rotdiag:";
  for (int i = 0; i < p; ++i) os << (i ? "," : "") << diag[static_cast<size_t>(i)];
  os << ":" << seed;
  spec.text = os.str();
  return spec;
}

CovarianceSpec parse_covariance_spec(const std::string& spec, int p) {
  auto parse_values = [&](const std::string& body) {
    std::vector<double> vals;
    std::istringstream is(body);
    std::string tok;
    while (std::getline(is, tok, ',')) vals.push_back(std::stod(tok));
    return vals;
  };
  if (spec == "identity" || spec.empty()) {
    CovarianceSpec s;
    s.kind = CovarianceSpec::Kind::Identity;
    s.text = "identity";
    return s;
  }
  try {
    if (spec.rfind("diag:", 0) == 0) {
      CovarianceSpec s;
      s.kind = CovarianceSpec::Kind::Diagonal;
      s.diag = parse_values(spec.substr(5));
      if (s.diag.size() == 1) s.diag.assign(static_cast<size_t>(p), s.diag[0]);
      s.text = spec;
      if (static_cast<int>(s.diag.size()) != p)
        throw format_error("diag covariance needs 1 or p values");
      for (double v : s.diag)
        if (!(v > 0.0)) throw configuration_error("diagonal covariance entries must be > 0");
      return s;
    }
    if (spec.rfind("rotdiag:", 0) == 0) {
      std::string body = spec.substr(8);
      uint64_t seed = 1;
      if (auto pos = body.find(':'); pos != std::string::npos) {
        seed = std::stoull(body.substr(pos + 1));
        body = body.substr(0, pos);
      }
      auto vals = parse_values(body);
      if (static_cast<int>(vals.size()) != p)
        throw format_error("rotdiag covariance needs p diagonal values");
      auto s = make_rotated_diag(vals, seed);
      return s;
    }
  } catch (const std::invalid_argument&) {
    throw format_error("cannot parse covariance spec '" + spec + "'");
  }
  throw format_error("unknown covariance spec '" + spec +
                     "' (expected identity, diag:..., rotdiag:...:seed)");
}

// -------------------------------------------------------------- ParamPoint

ParamPoint ParamPoint::univariate(double mu, double sigma) {
  if (!(sigma > 0.0)) throw domain_error("parameter point needs sigma > 0");
  ParamPoint pt;
  pt.kind = Kind::Univariate;
  pt.mu = mu;
  pt.sigma = sigma;
  return pt;
}

ParamPoint ParamPoint::multivariate(std::vector<double> nu, CovarianceSpec cov) {
  ParamPoint pt;
  pt.kind = Kind::Multivariate;
  pt.nu = std::move(nu);
  pt.cov = std::move(cov);
  return pt;
}

ParamPoint ParamPoint::compact(CompactDist dist) {
  ParamPoint pt;
  pt.kind = Kind::Compact;
  pt.dist = std::move(dist);
  return pt;
}

std::string ParamPoint::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Univariate:
      os << "mu=" << mu << " sigma=" << sigma << " lambda=" << lambda();
      break;
    case Kind::Multivariate: {
      double n2 = 0.0;
      for (double v : nu) n2 += v * v;
      os << "nu_norm=" << std::sqrt(n2) << " cov=" << cov.text;
      break;
    }
    case Kind::Compact:
      os << dist.describe();
      break;
  }
  return os.str();
}

bool MonteCarloReport::all_checks_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

bool ScanReport::all_checks_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  for (const auto& r : per_point)
    if (!r.all_checks_pass()) return false;
  return true;
}

// --------------------------------------------------------------- internals

namespace {

std::vector<double> cholesky_lower(const std::vector<double>& a, int p) {
  // Design note: PD tolerance 1e-10 on the smallest pivot.
  std::vector<double> l(static_cast<size_t>(p) * p, 0.0);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[static_cast<size_t>(i) * p + j];
      for (int k = 0; k < j; ++k)
        s -= l[static_cast<size_t>(i) * p + k] * l[static_cast<size_t>(j) * p + k];
      if (i == j) {
        if (!(s > 1e-10))
          throw configuration_error("covariance is not positive definite (pivot <= 1e-10)");
        l[static_cast<size_t>(i) * p + j] = std::sqrt(s);
      } else {
        l[static_cast<size_t>(i) * p + j] = s / l[static_cast<size_t>(j) * p + j];
      }
    }
  }
  return l;
}

int kernel_event_for(RuleKind kind) {
  switch (kind) {
    case RuleKind::MeanAR: return kernels::kEventMeanCentered;
    case RuleKind::MeanStein: return kernels::kEventMeanOrigin;
    case RuleKind::SigmaNormal:
    case RuleKind::SigmaGeneral: return kernels::kEventSigma;
    default:
      throw configuration_error("rule kind has no univariate event kernel");
  }
}

// Analytic coverage at a univariate point, where a formula exists.
std::optional<double> analytic_univariate(const IntervalRule& rule,
                                          const ScaledLocationFamily& family,
                                          double lambda) {
  switch (rule.kind) {
    case RuleKind::MeanAR:
      return coverage_mean_general(family, lambda, rule.c);
    case RuleKind::MeanStein:
      if (family.sample_model == SampleModel::Normal)
        return coverage_mean_stein(lambda, rule.c);
      return std::nullopt;
    case RuleKind::SigmaNormal:
    case RuleKind::SigmaGeneral:
      return 1.0 - sigma_coverage(family, lambda, rule.c);
    default:
      return std::nullopt;
  }
}

// Scalar fallback for families without a sampling kernel.
uint64_t count_generic_univariate(const ScaledLocationFamily& family,
                                  const kernels::UnivariateJob& jb, uint64_t key,
                                  uint64_t r0, uint64_t r1) {
  uint64_t hits = 0;
  for (uint64_t r = r0; r < r1; ++r) {
    double z = sample_scalar_standard(family, key, r);
    double x = jb.mu + jb.sigma * z;
    bool hit = false;
    switch (jb.event) {
      case kernels::kEventMeanCentered:
        hit = std::fabs(x - jb.mu) <= jb.c * std::fabs(x);
        break;
      case kernels::kEventMeanOrigin:
        hit = std::fabs(jb.mu) <= jb.c * std::fabs(x);
        break;
      default:
        hit = std::fabs(x) >= jb.c * jb.sigma;
        break;
    }
    hits += hit ? 1 : 0;
  }
  return hits;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void attach_univariate_checks(MonteCarloReport& rep) {
  if (rep.analytic_coverage) {
    double se = check_se(rep.hits, rep.n_reps);
    double margin = 4.0 * se - std::fabs(rep.coverage_hat - *rep.analytic_coverage);
    rep.checks.push_back({"agreement-4se", margin >= 0.0, margin});
  }
}

void attach_bound_check(MonteCarloReport& rep) {
  double se = check_se(rep.hits, rep.n_reps);
  double bound = 1.0 - rep.rule.alpha;
  double margin = rep.coverage_hat - (bound - 3.0 * se);
  rep.checks.push_back({"bound-3se", margin >= 0.0, margin});
}

}  // namespace

// -------------------------------------------------------------- operations

MonteCarloReport simulate_coverage(const IntervalRule& rule, const ParamPoint& point,
                                   uint64_t n, uint64_t seed, const McOptions& opts,
                                   const ScaledLocationFamily* family) {
  require_reps_and_range(n);
  Timer timer;

  if (rule.kind == RuleKind::SigmaCompact) {
    if (point.kind != ParamPoint::Kind::Compact)
      throw configuration_error("sigma-compact rule needs a compact distribution point");
    return simulate_compact(rule, point.dist, n, seed, opts);
  }
  if (rule.kind == RuleKind::MeanMultivariate) {
    if (point.kind != ParamPoint::Kind::Multivariate)
      throw configuration_error("mean-multivariate rule needs a multivariate point");
    if (!rule.dims) throw configuration_error("mean-multivariate rule is missing (p, m)");
    return simulate_multivariate(rule.alpha, rule.dims->first, rule.dims->second, point.nu,
                                 point.cov, n, seed, opts);
  }

  if (point.kind != ParamPoint::Kind::Univariate)
    throw configuration_error("univariate rule needs a (mu, sigma) point");

  ScaledLocationFamily resolved;
  const ScaledLocationFamily* fam = family;
  if (fam == nullptr) {
    if (!rule.family) throw configuration_error("univariate rule is missing its family");
    resolved = make_builtin_family(*rule.family);
    fam = &resolved;
  }

  kernels::UnivariateJob jb;
  jb.event = kernel_event_for(rule.kind);
  jb.mu = point.mu;
  jb.sigma = point.sigma;
  jb.c = rule.c;

  uint64_t key = kernels::derive_stream_key(seed);
  int threads = resolve_threads(opts.threads);
  uint64_t hits = 0;
  if (fam->sample_model == SampleModel::Normal || fam->sample_model == SampleModel::Cauchy) {
    jb.model = fam->sample_model == SampleModel::Normal ? kernels::kModelNormal
                                                        : kernels::kModelCauchy;
    const kernels::KernelOps& ops = kernels::active_ops();
    hits = parallel_hits(n, threads,
                         [&](uint64_t r0, uint64_t r1) { return ops.count_univariate(jb, key, r0, r1); });
  } else {
    if (!fam->has_quantile())
      throw configuration_error("family '" + fam->name +
                                "' has no quantile; cannot sample from it");
    hits = parallel_hits(n, threads, [&](uint64_t r0, uint64_t r1) {
      return count_generic_univariate(*fam, jb, key, r0, r1);
    });
  }

  MonteCarloReport rep;
  rep.rule = rule;
  rep.point = point;
  rep.n_reps = n;
  rep.hits = hits;
  rep.coverage_hat = static_cast<double>(hits) / static_cast<double>(n);
  rep.std_error = binomial_se(rep.coverage_hat, n);
  rep.seed = seed;
  rep.analytic_coverage = analytic_univariate(rule, *fam, point.lambda());
  attach_univariate_checks(rep);
  rep.wall_time_s = timer.seconds();
  return rep;
}

MonteCarloReport simulate_compact(const IntervalRule& rule, const CompactDist& dist,
                                  uint64_t n, uint64_t seed, const McOptions& opts) {
  require_reps_and_range(n);
  if (rule.kind != RuleKind::SigmaCompact)
    throw configuration_error("simulate_compact needs a sigma-compact rule");
  if (!rule.compact_bounds)
    throw configuration_error("sigma-compact rule is missing its (a, b) bounds");
  Timer timer;

  const auto [a, b] = *rule.compact_bounds;
  double total_prob = 0.0;
  std::vector<kernels::CompactComponent> comps;
  for (const auto& atom : dist.atoms) {
    if (atom.prob < 0.0) throw configuration_error("compact distribution: negative probability");
    double mag = std::fabs(atom.x);
    if (mag < a - 1e-12 || mag > b + 1e-12)
      throw configuration_error("compact distribution: atom magnitude outside [a, b]");
    total_prob += atom.prob;
    comps.push_back({0, atom.x, 0.0, total_prob});
  }
  for (const auto& seg : dist.segments) {
    if (seg.prob < 0.0) throw configuration_error("compact distribution: negative probability");
    if (!(seg.hi >= seg.lo) || seg.lo < a - 1e-12 || seg.hi > b + 1e-12)
      throw configuration_error("compact distribution: segment outside [a, b]");
    total_prob += seg.prob;
    comps.push_back({1, seg.lo, seg.hi - seg.lo, total_prob});
  }
  if (comps.empty() || std::fabs(total_prob - 1.0) > 1e-9)
    throw configuration_error("compact distribution: probabilities must sum to 1");
  comps.back().cum = 1.0;

  kernels::CompactJob jb;
  jb.comp = comps.data();
  jb.n_comp = static_cast<int>(comps.size());
  jb.c2_var = rule.c * rule.c * dist.variance();

  uint64_t key = kernels::derive_stream_key(seed);
  const kernels::KernelOps& ops = kernels::active_ops();
  uint64_t hits = parallel_hits(n, resolve_threads(opts.threads), [&](uint64_t r0, uint64_t r1) {
    return ops.count_compact(jb, key, r0, r1);
  });

  MonteCarloReport rep;
  rep.rule = rule;
  rep.point = ParamPoint::compact(dist);
  rep.n_reps = n;
  rep.hits = hits;
  rep.coverage_hat = static_cast<double>(hits) / static_cast<double>(n);
  rep.std_error = binomial_se(rep.coverage_hat, n);
  rep.seed = seed;
  attach_bound_check(rep);
  rep.wall_time_s = timer.seconds();
  return rep;
}

MonteCarloReport simulate_multivariate(double alpha, int p, int m,
                                       const std::vector<double>& nu,
                                       const CovarianceSpec& cov, uint64_t n, uint64_t seed,
                                       const McOptions& opts) {
  require_reps_and_range(n);
  if (static_cast<int>(nu.size()) != p)
    throw configuration_error("mean vector length must equal p");
  if (static_cast<uint64_t>(p) * static_cast<uint64_t>(m) >= (uint64_t(1) << 31))
    throw configuration_error("p*m exceeds the per-replicate draw budget");
  Timer timer;

  CalibrationResult cal = calibrate_multivariate(alpha, p, m);

  std::vector<double> factor;
  bool diagonal = true;
  switch (cov.kind) {
    case CovarianceSpec::Kind::Identity:
      factor.assign(static_cast<size_t>(p), 1.0);
      break;
    case CovarianceSpec::Kind::Diagonal:
      if (static_cast<int>(cov.diag.size()) != p)
        throw configuration_error("diagonal covariance length must equal p");
      factor.reserve(static_cast<size_t>(p));
      for (double v : cov.diag) {
        if (!(v > 0.0)) throw configuration_error("covariance diagonal must be positive");
        factor.push_back(std::sqrt(v));
      }
      break;
    case CovarianceSpec::Kind::Dense:
      if (static_cast<int>(cov.dense.size()) != p * p)
        throw configuration_error("dense covariance must be p*p");
      factor = cholesky_lower(cov.dense, p);
      diagonal = false;
      break;
  }

  double nu_norm2 = 0.0;
  for (double v : nu) nu_norm2 += v * v;

  kernels::MultivariateJob jb;
  jb.p = p;
  jb.m = m;
  jb.diagonal = diagonal ? 1 : 0;
  jb.mu = nu.data();
  jb.factor = factor.data();
  jb.c2 = cal.rule.c * cal.rule.c;
  jb.threshold = static_cast<double>(m) * nu_norm2;

  uint64_t key = kernels::derive_stream_key(seed);
  const kernels::KernelOps& ops = kernels::active_ops();
  uint64_t hits = parallel_hits(n, resolve_threads(opts.threads), [&](uint64_t r0, uint64_t r1) {
    return ops.count_multivariate(jb, key, r0, r1);
  });

  MonteCarloReport rep;
  rep.rule = cal.rule;
  rep.point = ParamPoint::multivariate(nu, cov);
  rep.n_reps = n;
  rep.hits = hits;
  rep.coverage_hat = static_cast<double>(hits) / static_cast<double>(n);
  rep.std_error = binomial_se(rep.coverage_hat, n);
  rep.seed = seed;
  attach_bound_check(rep);
  rep.wall_time_s = timer.seconds();
  return rep;
}

ScanReport scan_infimum(const IntervalRule& rule, const std::vector<ParamPoint>& grid,
                        uint64_t n_per_point, uint64_t seed, const McOptions& opts,
                        const ScaledLocationFamily* family) {
  if (grid.empty()) throw domain_error("scan_infimum: grid must be nonempty");

  ScanReport scan;
  scan.rule = rule;
  scan.seed = seed;
  scan.per_point.reserve(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    uint64_t point_seed = kernels::derive_stream_key(seed, i + 1);
    scan.per_point.push_back(
        simulate_coverage(rule, grid[i], n_per_point, point_seed, opts, family));
  }

  scan.argmin_index = 0;
  for (size_t i = 1; i < scan.per_point.size(); ++i)
    if (scan.per_point[i].coverage_hat < scan.per_point[scan.argmin_index].coverage_hat)
      scan.argmin_index = i;
  scan.empirical_infimum = scan.per_point[scan.argmin_index].coverage_hat;

  // Analytic infimum where the theory provides one.
  ScaledLocationFamily resolved;
  const ScaledLocationFamily* fam = family;
  if (fam == nullptr && rule.family) {
    if (*rule.family == "normal" || *rule.family == "cauchy") {
      resolved = make_builtin_family(*rule.family);
      fam = &resolved;
    }
  }
  if (fam != nullptr) {
    switch (rule.kind) {
      case RuleKind::MeanAR:
      case RuleKind::MeanStein:
        scan.analytic_infimum = psi(*fam, rule.c);
        break;
      case RuleKind::SigmaNormal:
      case RuleKind::SigmaGeneral:
        scan.analytic_infimum = 1.0 - sigma_coverage(*fam, 0.0, rule.c);
        break;
      default:
        break;
    }
  }

  if (scan.analytic_infimum) {
    const auto& argmin = scan.per_point[scan.argmin_index];
    // Grid points sit above the true infimum; allow that gap plus MC noise.
    double grid_gap = 0.0;
    if (argmin.analytic_coverage)
      grid_gap = *argmin.analytic_coverage - *scan.analytic_infimum;
    double se = check_se(argmin.hits, argmin.n_reps);
    double diff = std::fabs(scan.empirical_infimum - *scan.analytic_infimum);
    double margin = 3.0 * se + std::max(grid_gap, 0.0) - diff;
    scan.checks.push_back({"infimum-3se", margin >= 0.0, margin});
  }
  return scan;
}

MixtureCheckReport noncentral_chisq_mixture_check(int df, double noncentrality,
                                                  double quantile, uint64_t n, uint64_t seed,
                                                  const McOptions& opts) {
  if (df < 1) throw domain_error("noncentral_chisq_mixture_check: df >= 1 required");
  if (noncentrality < 0.0)
    throw domain_error("noncentral_chisq_mixture_check: noncentrality must be >= 0");
  double mean_k = 0.5 * noncentrality;
  if (mean_k > 200.0)
    throw configuration_error(
        "noncentrality too large for the inversion Poisson sampler (mean > 200)");
  require_reps_and_range(n);

  const double shift = std::sqrt(noncentrality);
  uint64_t key_direct = kernels::derive_stream_key(seed, 1);
  uint64_t key_mixture = kernels::derive_stream_key(seed, 2);
  int threads = resolve_threads(opts.threads);

  auto normal_at = [](uint64_t key, uint64_t rep, uint32_t draw) {
    return kernels::normal_icdf(
               kernels::ScalarVec{kernels::stream_u01_at(key, draw_position(rep, draw))})
        .v;
  };

  uint64_t hits_direct = parallel_hits(n, threads, [&](uint64_t r0, uint64_t r1) {
    uint64_t h = 0;
    for (uint64_t r = r0; r < r1; ++r) {
      double z0 = normal_at(key_direct, r, 0) + shift;
      double s = z0 * z0;
      for (int i = 1; i < df; ++i) {
        double z = normal_at(key_direct, r, static_cast<uint32_t>(i));
        s += z * z;
      }
      h += (s <= quantile) ? 1 : 0;
    }
    return h;
  });

  const double p0 = std::exp(-mean_k);
  uint64_t hits_mixture = parallel_hits(n, threads, [&](uint64_t r0, uint64_t r1) {
    uint64_t h = 0;
    for (uint64_t r = r0; r < r1; ++r) {
      // K ~ Poisson(mean_k) by inversion on one uniform.
      double u = kernels::stream_u01_at(key_mixture, draw_position(r, 0));
      int k = 0;
      double term = p0, cum = p0;
      while (u > cum && k < 100000) {
        ++k;
        term *= mean_k / k;
        cum += term;
      }
      int dof = df + 2 * k;
      double s = 0.0;
      for (int i = 0; i < dof; ++i) {
        double z = normal_at(key_mixture, r, static_cast<uint32_t>(i + 1));
        s += z * z;
      }
      h += (s <= quantile) ? 1 : 0;
    }
    return h;
  });

  MixtureCheckReport rep;
  rep.df = df;
  rep.noncentrality = noncentrality;
  rep.quantile = quantile;
  rep.n_reps = n;
  rep.seed = seed;
  rep.direct_hat = static_cast<double>(hits_direct) / static_cast<double>(n);
  rep.mixture_hat = static_cast<double>(hits_mixture) / static_cast<double>(n);
  rep.direct_se = check_se(hits_direct, n);
  rep.mixture_se = check_se(hits_mixture, n);
  rep.combined_se = std::sqrt(rep.direct_se * rep.direct_se + rep.mixture_se * rep.mixture_se);
  rep.agree = std::fabs(rep.direct_hat - rep.mixture_hat) <= 4.0 * rep.combined_se;
  return rep;
}

ScanReport verify_mlr_inequality(double c, const std::vector<double>& lambda_grid,
                                 uint64_t n, uint64_t seed, const McOptions& opts) {
  if (!(c > 0.0)) throw domain_error("verify_mlr_inequality: c must be > 0");
  if (lambda_grid.empty()) throw domain_error("verify_mlr_inequality: grid must be nonempty");

  IntervalRule rule;
  rule.kind = RuleKind::SigmaNormal;
  rule.c = c;
  rule.alpha = 2.0 * (1.0 - std_normal_cdf(c));
  rule.family = "normal";

  std::vector<ParamPoint> grid;
  grid.reserve(lambda_grid.size());
  for (double l : lambda_grid) grid.push_back(ParamPoint::univariate(l, 1.0));
  ScanReport scan = scan_infimum(rule, grid, n, seed, opts);

  // Dominance over the central case and monotonicity in |lambda|, both up
  // to 3 SE of Monte Carlo noise.
  double central = 2.0 * (1.0 - std_normal_cdf(c));
  bool dominated = true;
  double worst_dom = 1.0;
  for (const auto& rp : scan.per_point) {
    double se = check_se(rp.hits, rp.n_reps);
    double margin = rp.coverage_hat - (central - 3.0 * se);
    worst_dom = std::min(worst_dom, margin);
    dominated = dominated && margin >= 0.0;
  }
  scan.checks.push_back({"dominates-central-3se", dominated, worst_dom});

  bool monotone = true;
  double worst_mono = 1.0;
  for (size_t i = 0; i + 1 < scan.per_point.size(); ++i) {
    const auto& lo = scan.per_point[i];
    const auto& hi = scan.per_point[i + 1];
    double se_lo = check_se(lo.hits, lo.n_reps);
    double se_hi = check_se(hi.hits, hi.n_reps);
    double allow = 3.0 * std::sqrt(se_lo * se_lo + se_hi * se_hi);
    double margin = hi.coverage_hat - lo.coverage_hat + allow;
    worst_mono = std::min(worst_mono, margin);
    monotone = monotone && margin >= 0.0;
  }
  scan.checks.push_back({"nondecreasing-3se", monotone, worst_mono});
  return scan;
}

}  // namespace oneobs
