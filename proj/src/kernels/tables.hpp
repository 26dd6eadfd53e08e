#pragma once

#include "tlsdrive/kernels.hpp"

namespace tls::kernels::detail {

extern const Table scalar_table;
#if defined(TLSDRIVE_HAVE_AVX2)
extern const Table avx2_table;
#endif

}  // namespace tls::kernels::detail
