#pragma once

// Job descriptions consumed by the event-count kernels. Plain structs with
// raw pointers so the same ABI serves every backend; the pointed-to arrays
// must outlive the call.

#include <cstddef>
#include <cstdint>

namespace oneobs::kernels {

inline constexpr int kModelNormal = 0;
inline constexpr int kModelCauchy = 1;

// Coverage events for one scalar observation X = mu + sigma * Z:
//   MeanCentered: |X - mu| <= c |X|   (interval centered at the observation)
//   MeanOrigin:   |mu|     <= c |X|   (interval centered at the origin)
//   Sigma:        |X|      >= c sigma (scale interval sigma <= |X|/c)
inline constexpr int kEventMeanCentered = 0;
inline constexpr int kEventMeanOrigin = 1;
inline constexpr int kEventSigma = 2;

struct UnivariateJob {
  int model = kModelNormal;
  int event = kEventMeanCentered;
  double mu = 0.0;
  double sigma = 1.0;
  double c = 0.0;
};

// One mixture component of a compact-support distribution. Atoms carry a
// signed value in `lo` (width 0); segments are uniform magnitudes on
// [lo, lo+width] with an independent random sign. `cum` is the inclusive
// cumulative selection probability; the last entry must be exactly 1.
struct CompactComponent {
  int is_segment = 0;
  double lo = 0.0;
  double width = 0.0;
  double cum = 1.0;
};

struct CompactJob {
  const CompactComponent* comp = nullptr;
  int n_comp = 0;
  double c2_var = 0.0;  // c^2 * Var(X), the event is X^2 >= c2_var
};

// Event ||mu|| <= c ||X|| / sqrt(m) for m draws from N_p(mu, Sigma),
// checked as threshold <= c2 * sum_j ||mu + L z_j||^2 with
// threshold = m ||mu||^2 and Sigma = L L^T.
struct MultivariateJob {
  int p = 1;
  int m = 1;
  int diagonal = 1;            // 1: factor holds p scales; 0: p*p lower-tri L
  const double* mu = nullptr;  // length p
  const double* factor = nullptr;
  double c2 = 0.0;
  double threshold = 0.0;
};

struct KernelOps {
  const char* name;
  uint64_t (*count_univariate)(const UnivariateJob&, uint64_t key, uint64_t r0, uint64_t r1);
  uint64_t (*count_compact)(const CompactJob&, uint64_t key, uint64_t r0, uint64_t r1);
  uint64_t (*count_multivariate)(const MultivariateJob&, uint64_t key, uint64_t r0, uint64_t r1);
  void (*normal_icdf_array)(const double* p, double* z, size_t n);
  void (*u01_array)(uint64_t key, uint64_t pos0, double* u, size_t n);
};

}  // namespace oneobs::kernels
