#pragma once

#include "rdemod/simd/kernels.hpp"

namespace rdemod::simd::detail {

// Defined in kernels_avx2.cpp; nullptr on builds without the AVX2 unit.
const KernelTable* avx2_table_if_built();

}  // namespace rdemod::simd::detail
