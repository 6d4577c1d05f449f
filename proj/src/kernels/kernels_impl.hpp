#pragma once

// Kernel bodies, written once against the batch types and instantiated per
// backend TU. The vector paths process whole lanes of replicates and hand
// the remainder to the width-1 instantiation, so the hit count for a
// replicate range is independent of lane width, thread count and chunking.

#include <cmath>
#include <cstdint>
#include <vector>

#include "oneobs/kernels/batch.hpp"
#include "oneobs/kernels/events.hpp"
#include "oneobs/kernels/math.hpp"
#include "oneobs/kernels/rng.hpp"

namespace oneobs::kernels {

template <class V>
inline V draw_standard(int model, uint64_t key, typename V::uvec pos0) {
  if (model == kModelCauchy) {
    // Ratio of independent standard normals is standard Cauchy; reuses the
    // one quantile kernel instead of a bespoke vector tangent.
    V z1 = normal_icdf(stream_u01(key, pos0));
    V z2 = normal_icdf(stream_u01(key, pos0 | V::uvec::broadcast(1)));
    return z1 / z2;
  }
  return normal_icdf(stream_u01(key, pos0));
}

template <class V>
uint64_t count_univariate_impl(const UnivariateJob& jb, uint64_t key, uint64_t r0,
                               uint64_t r1) {
  using U = typename V::uvec;
  using M = typename V::mask;
  const V mu = V::broadcast(jb.mu);
  const V sigma = V::broadcast(jb.sigma);
  const V c = V::broadcast(jb.c);
  const V abs_mu = V::broadcast(std::fabs(jb.mu));
  const V c_sigma = V::broadcast(jb.c * jb.sigma);

  uint64_t hits = 0;
  uint64_t r = r0;
  for (; r + V::width <= r1; r += V::width) {
    U pos0 = shl(U::iota(r), 32);
    V z = draw_standard<V>(jb.model, key, pos0);
    V x = fma_(sigma, z, mu);
    M hit;
    switch (jb.event) {
      case kEventMeanCentered:
        hit = (abs_(x - mu) <= c * abs_(x));
        break;
      case kEventMeanOrigin:
        hit = (abs_mu <= c * abs_(x));
        break;
      default:
        hit = (abs_(x) >= c_sigma);
        break;
    }
    hits += static_cast<uint64_t>(mask_count(hit));
  }
  if constexpr (V::width > 1) {
    if (r < r1) hits += count_univariate_impl<ScalarVec>(jb, key, r, r1);
  }
  return hits;
}

template <class V>
uint64_t count_compact_impl(const CompactJob& jb, uint64_t key, uint64_t r0,
                            uint64_t r1) {
  using U = typename V::uvec;
  using M = typename V::mask;
  const V half = V::broadcast(0.5);
  const V c2_var = V::broadcast(jb.c2_var);
  const V zero = V::broadcast(0.0);

  uint64_t hits = 0;
  uint64_t r = r0;
  for (; r + V::width <= r1; r += V::width) {
    U pos0 = shl(U::iota(r), 32);
    V u_sel = stream_u01(key, pos0);
    V u_pos = stream_u01(key, pos0 | U::broadcast(1));
    V u_sign = stream_u01(key, pos0 | U::broadcast(2));

    V x2 = zero;
    M done = (zero < zero);
    for (int k = 0; k < jb.n_comp; ++k) {
      const CompactComponent& comp = jb.comp[k];
      M in_k = mask_andnot(done, u_sel < V::broadcast(comp.cum));
      V val;
      if (comp.is_segment) {
        V mag = fma_(u_pos, V::broadcast(comp.width), V::broadcast(comp.lo));
        val = select(u_sign < half, neg_(mag), mag);
      } else {
        val = V::broadcast(comp.lo);
      }
      x2 = select(in_k, val * val, x2);
      done = mask_or(done, in_k);
    }
    hits += static_cast<uint64_t>(mask_count(x2 >= c2_var));
  }
  if constexpr (V::width > 1) {
    if (r < r1) hits += count_compact_impl<ScalarVec>(jb, key, r, r1);
  }
  return hits;
}

template <class V>
uint64_t count_multivariate_impl(const MultivariateJob& jb, uint64_t key, uint64_t r0,
                                 uint64_t r1) {
  using U = typename V::uvec;
  const int p = jb.p;
  const int m = jb.m;
  const V c2 = V::broadcast(jb.c2);
  const V threshold = V::broadcast(jb.threshold);
  std::vector<V> z(static_cast<size_t>(p));

  uint64_t hits = 0;
  uint64_t r = r0;
  for (; r + V::width <= r1; r += V::width) {
    U pos0 = shl(U::iota(r), 32);
    V acc = V::broadcast(0.0);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < p; ++i) {
        U pos = pos0 | U::broadcast(static_cast<uint64_t>(j * p + i));
        z[static_cast<size_t>(i)] = normal_icdf(stream_u01(key, pos));
      }
      if (jb.diagonal) {
        for (int i = 0; i < p; ++i) {
          V x = fma_(V::broadcast(jb.factor[i]), z[static_cast<size_t>(i)],
                     V::broadcast(jb.mu[i]));
          acc = fma_(x, x, acc);
        }
      } else {
        for (int i = 0; i < p; ++i) {
          V x = V::broadcast(jb.mu[i]);
          for (int k = 0; k <= i; ++k)
            x = fma_(V::broadcast(jb.factor[i * p + k]), z[static_cast<size_t>(k)], x);
          acc = fma_(x, x, acc);
        }
      }
    }
    hits += static_cast<uint64_t>(mask_count(threshold <= c2 * acc));
  }
  if constexpr (V::width > 1) {
    if (r < r1) hits += count_multivariate_impl<ScalarVec>(jb, key, r, r1);
  }
  return hits;
}

template <class V>
void normal_icdf_array_impl(const double* p, double* z, size_t n) {
  size_t i = 0;
  for (; i + V::width <= n; i += V::width) {
    normal_icdf(V::load(p + i)).store(z + i);
  }
  if constexpr (V::width > 1) {
    for (; i < n; ++i) z[i] = normal_icdf(ScalarVec{p[i]}).v;
  }
}

template <class V>
void u01_array_impl(uint64_t key, uint64_t pos0, double* u, size_t n) {
  using U = typename V::uvec;
  size_t i = 0;
  for (; i + V::width <= n; i += V::width) {
    stream_u01(key, U::iota(pos0 + i)).store(u + i);
  }
  if constexpr (V::width > 1) {
    for (; i < n; ++i) u[i] = stream_u01_at(key, pos0 + i);
  }
}

template <class V>
KernelOps make_kernel_ops(const char* name) {
  KernelOps ops{};
  ops.name = name;
  ops.count_univariate = [](const UnivariateJob& jb, uint64_t key, uint64_t r0,
                            uint64_t r1) { return count_univariate_impl<V>(jb, key, r0, r1); };
  ops.count_compact = [](const CompactJob& jb, uint64_t key, uint64_t r0, uint64_t r1) {
    return count_compact_impl<V>(jb, key, r0, r1);
  };
  ops.count_multivariate = [](const MultivariateJob& jb, uint64_t key, uint64_t r0,
                              uint64_t r1) { return count_multivariate_impl<V>(jb, key, r0, r1); };
  ops.normal_icdf_array = [](const double* p, double* z, size_t n) {
    normal_icdf_array_impl<V>(p, z, n);
  };
  ops.u01_array = [](uint64_t key, uint64_t pos0, double* u, size_t n) {
    u01_array_impl<V>(key, pos0, u, n);
  };
  return ops;
}

}  // namespace oneobs::kernels
