// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "touchauth/kernels.hpp"

namespace touchauth::kernels::detail {

// Each returns nullptr when the variant is not compiled for this target.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

}  // namespace touchauth::kernels::detail
