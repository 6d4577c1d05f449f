#pragma once

// Standardized symmetric location-scale families: the observation model is
// X ~ (1/sigma) f0((x - mu)/sigma) with f0 even. Built-in normal and Cauchy
// members carry closed forms; arbitrary user densities come in as sampled
// tables on z >= 0 and are extended symmetrically.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oneobs {

enum class SampleModel { Normal, Cauchy, Generic };

struct ScaledLocationFamily {
  std::string name;
  std::function<double(double)> pdf;      // f0(z)
  std::function<double(double)> log_pdf;  // log f0(z), -inf where f0 == 0
  std::function<double(double)> cdf;      // F0(x)
  std::function<double(double)> quantile; // may be empty
  double support_radius = 0.0;            // +inf for unbounded support
  bool symmetric = false;
  bool strictly_unimodal = false;
  SampleModel sample_model = SampleModel::Generic;

  bool has_quantile() const { return static_cast<bool>(quantile); }
};

/// Closed-form families: name is "normal" or "cauchy".
/// Throws configuration_error for anything else.
ScaledLocationFamily make_builtin_family(std::string_view name);

/// Family from density samples (z, f0(z)) with z strictly increasing from 0,
/// at least 8 rows, finite nonnegative densities. The density is interpolated
/// by a monotone piecewise cubic, integrated by adaptive Simpson, and
/// renormalized to unit mass; total mass more than 10% off 1 is rejected as
/// data_error (the table is probably not a density).
ScaledLocationFamily make_family_from_table(
    std::span<const std::pair<double, double>> rows,
    std::string name = "table");

/// CSV with header "z,f0". Parse errors throw format_error.
ScaledLocationFamily load_family_csv(const std::string& path);

/// "normal" | "cauchy" | "table:<path>".
ScaledLocationFamily resolve_family(std::string_view spec);

struct AssumptionReport {
  bool mlr_ok = false;
  bool logconvex_ok = false;
  bool inconclusive = false;
  double worst_violation = 0.0;
  std::string grid_spec;
  std::string note;
};

/// Grid diagnostic (not a proof) for the two structural hypotheses behind
/// the general mean interval: with g(theta|a) = a f0(a theta),
///  (a) the ratio g(theta|a2)/g(theta|a1) is monotone in theta for a1 < a2,
///  (b) log[g(theta|a1)/g(theta|a2)] is convex in theta (the direction in
///      which the scale ratio must eventually dominate; the normal family
///      satisfies it, see tests).
/// Zero densities on the grid make the ratio undefined; that is reported as
/// inconclusive rather than thrown.
AssumptionReport validate_assumptions(const ScaledLocationFamily& family,
                                      std::span<const double> theta_grid,
                                      std::span<const double> scale_grid);

}  // namespace oneobs
