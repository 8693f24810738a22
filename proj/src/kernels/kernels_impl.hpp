#pragma once

#include "hess2/kernels.hpp"

namespace hess2::kernels::detail {

extern const KernelTable kScalarTable;
#if HESS2_HAVE_AVX2
extern const KernelTable kAvx2Table;
#endif

}  // namespace hess2::kernels::detail
