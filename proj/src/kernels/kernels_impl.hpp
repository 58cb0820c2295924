#pragma once

#include "toposcore/kernels.hpp"

namespace toposcore::simd::detail {

const KernelTable& scalar_table();

// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

}  // namespace toposcore::simd::detail
