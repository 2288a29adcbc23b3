#pragma once

#include "l2gap/simd/kernels.hpp"

namespace l2gap::simd::detail {

// Null when the variant was not compiled for this target.
const Kernels* avx2_table() noexcept;
const Kernels* neon_table() noexcept;

}  // namespace l2gap::simd::detail
