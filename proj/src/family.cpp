#include "oneobs/family.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "oneobs/errors.hpp"
#include "oneobs/normal.hpp"
#include "oneobs/pchip.hpp"
#include "oneobs/quadrature.hpp"
#include "oneobs/rootfind.hpp"

namespace oneobs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;
constexpr double kPi = 3.14159265358979323846264338;

// Shared state of a tabulated family: interpolated density on [0, radius]
// plus exact per-interval cumulative integrals of the interpolant.
struct TableDensity {
  MonotoneCubic interp;
  std::vector<double> cum;  // cum[i] = integral of interp on [z_0, z_i]
  double total = 0.0;       // 2 * cum.back() before renormalization
  double radius = 0.0;

  explicit TableDensity(MonotoneCubic ip) : interp(std::move(ip)) {
    const auto& z = interp.knots();
    cum.assign(z.size(), 0.0);
    // Simpson is exact on cubics, so the per-interval tolerance is nominal.
    for (size_t i = 1; i < z.size(); ++i) {
      double piece = adaptive_simpson([this](double t) { return interp(t); }, z[i - 1],
                                      z[i], 1e-12);
      cum[i] = cum[i - 1] + piece;
    }
    total = 2.0 * cum.back();
    radius = z.back();
  }

  // Integral of the raw interpolant over [0, u], u in [0, radius].
  double half_integral(double u) const {
    const auto& z = interp.knots();
    if (u <= 0.0) return 0.0;
    if (u >= radius) return cum.back();
    size_t i = static_cast<size_t>(std::upper_bound(z.begin(), z.end(), u) - z.begin() - 1);
    return cum[i] +
           adaptive_simpson([this](double t) { return interp(t); }, z[i], u, 1e-13);
  }

  double pdf(double x) const {
    double a = std::fabs(x);
    if (a >= radius) return a == radius ? interp(a) / total : 0.0;
    return interp(a) / total;
  }

  double cdf(double x) const {
    double tail = half_integral(std::fabs(x)) / total;
    return x >= 0.0 ? 0.5 + tail : 0.5 - tail;
  }
};

}  // namespace

ScaledLocationFamily make_builtin_family(std::string_view name) {
  ScaledLocationFamily fam;
  fam.symmetric = true;
  fam.strictly_unimodal = true;
  fam.support_radius = kInf;
  if (name == "normal") {
    fam.name = "normal";
    fam.sample_model = SampleModel::Normal;
    fam.pdf = [](double z) { return std_normal_pdf(z); };
    fam.log_pdf = [](double z) { return -0.5 * z * z - kLogSqrt2Pi; };
    fam.cdf = [](double x) { return std_normal_cdf(x); };
    fam.quantile = [](double p) { return std_normal_quantile(p); };
  } else if (name == "cauchy") {
    fam.name = "cauchy";
    fam.sample_model = SampleModel::Cauchy;
    fam.pdf = [](double z) { return 1.0 / (kPi * (1.0 + z * z)); };
    fam.log_pdf = [](double z) { return -std::log(kPi) - std::log1p(z * z); };
    fam.cdf = [](double x) { return 0.5 + std::atan(x) / kPi; };
    fam.quantile = [](double p) { return std::tan(kPi * (p - 0.5)); };
  } else {
    throw configuration_error("unknown family '" + std::string(name) +
                              "' (expected normal or cauchy)");
  }
  return fam;
}

ScaledLocationFamily make_family_from_table(
    std::span<const std::pair<double, double>> rows, std::string name) {
  if (rows.size() < 8)
    throw format_error("density table needs at least 8 rows, got " +
                       std::to_string(rows.size()));
  std::vector<double> z, f;
  z.reserve(rows.size());
  f.reserve(rows.size());
  for (const auto& [zi, fi] : rows) {
    if (!std::isfinite(zi) || !std::isfinite(fi))
      throw format_error("density table contains non-finite values");
    if (fi < 0.0) throw format_error("density table contains a negative density value");
    if (!z.empty() && zi <= z.back())
      throw format_error("density table abscissae must be strictly increasing");
    z.push_back(zi);
    f.push_back(fi);
  }
  if (z.front() != 0.0) throw format_error("density table must start at z = 0");

  auto density = std::make_shared<TableDensity>(MonotoneCubic(std::move(z), std::move(f)));
  if (std::fabs(density->total - 1.0) > 0.10)
    throw data_error("table mass " + std::to_string(density->total) +
                     " deviates from 1 by more than 10%; not a density");

  ScaledLocationFamily fam;
  fam.name = std::move(name);
  fam.symmetric = true;  // imposed by the symmetric extension
  fam.support_radius = density->radius;
  fam.sample_model = SampleModel::Generic;
  fam.pdf = [density](double x) { return density->pdf(x); };
  fam.log_pdf = [density](double x) {
    double v = density->pdf(x);
    return v > 0.0 ? std::log(v) : -kInf;
  };
  fam.cdf = [density](double x) { return density->cdf(x); };

  // Strict unimodality: knot densities strictly decreasing on (0, radius),
  // judged at grid resolution.
  const auto& ky = density->interp.values();
  bool decreasing = true;
  for (size_t i = 1; i < ky.size() && decreasing; ++i)
    if (ky[i] >= ky[i - 1]) decreasing = false;
  fam.strictly_unimodal = decreasing;

  // Invertible CDF needs positive mass in every knot interval.
  bool invertible = true;
  for (size_t i = 1; i < density->cum.size() && invertible; ++i)
    if (!(density->cum[i] > density->cum[i - 1])) invertible = false;
  if (invertible) {
    double radius = density->radius;
    fam.quantile = [density, radius](double p) {
      if (!(p > 0.0 && p < 1.0))
        throw domain_error("table quantile: p must lie strictly in (0,1)");
      double lo = -radius, hi = radius;
      auto g = [&](double x) { return density->cdf(x) - p; };
      auto res = find_root_bracketed(g, lo, hi, 0.0 - p, 1.0 - p, 1e-15, 1e-14, 400);
      return res.x;
    };
  }
  return fam;
}

ScaledLocationFamily load_family_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open density table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw format_error("empty density table '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto strip = [](std::string s) {
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  if (strip(line) != "z,f0")
    throw format_error("density table '" + path + "' must start with header 'z,f0'");
  std::vector<std::pair<double, double>> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (strip(line).empty()) continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b))
      throw format_error("density table '" + path + "' line " + std::to_string(line_no) +
                         ": expected 'z,f0'");
    try {
      size_t pa = 0, pb = 0;
      double z = std::stod(strip(a), &pa);
      double f = std::stod(strip(b), &pb);
      rows.emplace_back(z, f);
    } catch (const std::exception&) {
      throw format_error("density table '" + path + "' line " + std::to_string(line_no) +
                         ": cannot parse numbers");
    }
  }
  std::string base = path;
  if (auto pos = base.find_last_of('/'); pos != std::string::npos) base = base.substr(pos + 1);
  return make_family_from_table(rows, "table:" + base);
}

ScaledLocationFamily resolve_family(std::string_view spec) {
  if (spec == "normal" || spec == "cauchy") return make_builtin_family(spec);
  constexpr std::string_view prefix = "table:";
  if (spec.substr(0, prefix.size()) == prefix)
    return load_family_csv(std::string(spec.substr(prefix.size())));
  throw configuration_error("unknown family spec '" + std::string(spec) +
                            "' (expected normal, cauchy or table:<path>)");
}

AssumptionReport validate_assumptions(const ScaledLocationFamily& family,
                                      std::span<const double> theta_grid,
                                      std::span<const double> scale_grid) {
  if (theta_grid.empty() || scale_grid.empty())
    throw domain_error("validate_assumptions: grids must be nonempty");
  for (size_t i = 0; i < theta_grid.size(); ++i)
    if (!(theta_grid[i] > 0.0) || (i > 0 && theta_grid[i] <= theta_grid[i - 1]))
      throw domain_error("validate_assumptions: theta grid must be positive and sorted");
  for (size_t i = 0; i < scale_grid.size(); ++i)
    if (!(scale_grid[i] > 0.0) || (i > 0 && scale_grid[i] <= scale_grid[i - 1]))
      throw domain_error("validate_assumptions: scale grid must be positive and sorted");

  constexpr double kTol = 1e-8;
  AssumptionReport rep;
  double worst_mlr = 0.0, worst_convex = 0.0;
  bool undefined = false;

  for (size_t ia = 0; ia + 1 < scale_grid.size(); ++ia) {
    for (size_t ib = ia + 1; ib < scale_grid.size(); ++ib) {
      double a1 = scale_grid[ia], a2 = scale_grid[ib];
      // L = log g(theta|a1) - log g(theta|a2) on the theta grid.
      std::vector<double> L(theta_grid.size());
      bool ok = true;
      for (size_t i = 0; i < theta_grid.size(); ++i) {
        double t = theta_grid[i];
        double g1 = family.log_pdf(a1 * t) + std::log(a1);
        double g2 = family.log_pdf(a2 * t) + std::log(a2);
        if (!std::isfinite(g1) || !std::isfinite(g2)) {
          ok = false;
          break;
        }
        L[i] = g1 - g2;
      }
      if (!ok) {
        undefined = true;
        continue;
      }
      // (a) monotone ratio: L must be monotone; direction from the endpoints.
      double dir = L.back() >= L.front() ? 1.0 : -1.0;
      for (size_t i = 0; i + 1 < L.size(); ++i)
        worst_mlr = std::max(worst_mlr, -dir * (L[i + 1] - L[i]));
      // (b) convexity of L: slopes nondecreasing.
      for (size_t i = 1; i + 1 < L.size(); ++i) {
        double s_prev = (L[i] - L[i - 1]) / (theta_grid[i] - theta_grid[i - 1]);
        double s_next = (L[i + 1] - L[i]) / (theta_grid[i + 1] - theta_grid[i]);
        worst_convex = std::max(worst_convex, s_prev - s_next);
      }
    }
  }

  rep.mlr_ok = worst_mlr <= kTol;
  rep.logconvex_ok = worst_convex <= kTol;
  rep.worst_violation = std::max(worst_mlr, worst_convex);
  rep.inconclusive = undefined;
  if (undefined)
    rep.note = "density vanished on part of the grid; those scale pairs were skipped";
  std::ostringstream gs;
  gs << "theta[" << theta_grid.front() << ".." << theta_grid.back() << " n="
     << theta_grid.size() << "] scales[" << scale_grid.front() << ".." << scale_grid.back()
     << " n=" << scale_grid.size() << "]";
  rep.grid_spec = gs.str();
  return rep;
}

}  // namespace oneobs
