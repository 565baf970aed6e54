// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "csd/types.hpp"

namespace csd {

// Directive-style tuning knobs of a synthesized kernel. These feed only the
// timing model; functional results never depend on them.
//
// Bound: unroll_factor <= partition_factor * (interface_width / 4), i.e. one
// unrolled lane per partitioned bank times 32-bit words per interface beat.
struct KernelConfig {
  u32 unroll_factor = 256;
  u32 partition_factor = 16;
  u32 interface_width = 64;  // bytes per beat

  bool valid() const {
    auto pow2 = [](u32 v) { return v != 0 && (v & (v - 1)) == 0; };
    if (!pow2(unroll_factor) || !pow2(partition_factor) || !pow2(interface_width)) {
      return false;
    }
    if (interface_width < 4) return false;
    return unroll_factor <= partition_factor * (interface_width / 4);
  }
};

}  // namespace csd
