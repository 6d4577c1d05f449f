#pragma once

#include <stdexcept>
#include <string>

namespace oneobs {

/// Bad numeric arguments (c <= 1, alpha outside (0,1), non-finite input, ...).
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Structurally invalid request: incompatible rule/point, non-PD covariance,
/// unknown family name, unsupported kernel backend.
struct configuration_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input files or option strings.
struct format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input parses but cannot be what it claims to be (e.g. a density table
/// whose total mass is far from 1).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A structural hypothesis required by the requested construction fails
/// (e.g. the family is not strictly unimodal).
struct assumption_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The requested confidence level is outside the attainable range of the
/// infimum-coverage function for this family.
struct unattainable_confidence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bracketing or polishing failed; usually means the family violates the
/// monotone-likelihood-ratio hypothesis.
struct root_not_found_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Compact-support calibration requested below the feasibility boundary.
/// Carries the smallest alpha the bound can serve.
struct infeasible_alpha_error : std::runtime_error {
  infeasible_alpha_error(const std::string& msg, double min_alpha)
      : std::runtime_error(msg), min_feasible_alpha(min_alpha) {}
  double min_feasible_alpha;
};

}  // namespace oneobs
