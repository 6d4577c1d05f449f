#include "kernels_impl.hpp"
#include "oneobs/kernels/dispatch.hpp"

namespace oneobs::kernels {

const KernelOps& scalar_ops() {
  static const KernelOps ops = make_kernel_ops<ScalarVec>("scalar");
  return ops;
}

}  // namespace oneobs::kernels
