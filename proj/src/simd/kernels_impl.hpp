#pragma once

#include "winter/simd/kernels.hpp"

namespace winter::simd::detail {

extern const KernelTable kScalarTable;
#if defined(WINTER_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace winter::simd::detail
