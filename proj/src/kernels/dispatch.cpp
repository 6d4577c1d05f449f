#include "oneobs/kernels/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "oneobs/errors.hpp"

namespace oneobs::kernels {

const KernelOps* avx2_ops_or_null();

#ifndef ONEOBS_BUILD_AVX2
const KernelOps* avx2_ops_or_null() { return nullptr; }
#endif

static bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelOps* simd_ops() {
  static const KernelOps* ops = cpu_has_avx2_fma() ? avx2_ops_or_null() : nullptr;
  return ops;
}

static Backend backend_from_env() {
  const char* e = std::getenv("ONEOBS_KERNEL");
  if (e == nullptr) return Backend::Auto;
  if (std::strcmp(e, "scalar") == 0) return Backend::Scalar;
  if (std::strcmp(e, "avx2") == 0 || std::strcmp(e, "simd") == 0) return Backend::Simd;
  return Backend::Auto;
}

static std::atomic<Backend>& backend_state() {
  static std::atomic<Backend> state{backend_from_env()};
  return state;
}

Backend backend() { return backend_state().load(); }

void set_backend(Backend b) {
  if (b == Backend::Simd && simd_ops() == nullptr)
    throw configuration_error("SIMD kernel backend requested but not available on this machine");
  backend_state().store(b);
}

const KernelOps& active_ops() {
  switch (backend()) {
    case Backend::Scalar:
      return scalar_ops();
    case Backend::Simd:
      if (const KernelOps* ops = simd_ops()) return *ops;
      throw configuration_error("SIMD kernel backend requested but not available on this machine");
    case Backend::Auto:
    default:
      if (const KernelOps* ops = simd_ops()) return *ops;
      return scalar_ops();
  }
}

const char* active_backend_name() { return active_ops().name; }

}  // namespace oneobs::kernels
