#pragma once

// Runtime backend selection. The scalar reference build is always present;
// the AVX2 variant is compiled when the toolchain supports it and selected
// when the CPU reports AVX2+FMA. Both backends produce bit-identical counts
// (see tests), so selection never changes results, only throughput.
//
// Override order: set_backend() > ONEOBS_KERNEL env var > auto.

#include <string>

#include "oneobs/kernels/events.hpp"

namespace oneobs::kernels {

enum class Backend { Auto, Scalar, Simd };

const KernelOps& scalar_ops();

// Best SIMD backend usable on this machine, or nullptr.
const KernelOps* simd_ops();

const KernelOps& active_ops();

// Throws configuration_error for Backend::Simd on machines without one.
void set_backend(Backend b);
Backend backend();
const char* active_backend_name();

}  // namespace oneobs::kernels
