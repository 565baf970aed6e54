// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "csd/api/session.hpp"

namespace csd::kernels {

// Registers the built-in kernels on a session:
//   "matmul_u32": two n x n u32 inputs, n x n output; dims optional ({n}).
//   "gf_matmul":  GF(2^8) product, dims required ({a_rows, a_cols, b_cols}).
void register_builtin_kernels(api::Session& session);

}  // namespace csd::kernels
