// Compiled with -mavx2 -mfma; see src/CMakeLists.txt.

#include "kernels_impl.hpp"
#include "oneobs/kernels/dispatch.hpp"

namespace oneobs::kernels {

#if ONEOBS_BATCH_HAS_AVX2

const KernelOps* avx2_ops_or_null() {
  static const KernelOps ops = make_kernel_ops<AvxVec>("avx2");
  return &ops;
}

#else

const KernelOps* avx2_ops_or_null() { return nullptr; }

#endif

}  // namespace oneobs::kernels
