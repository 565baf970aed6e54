// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "csd/error.hpp"
#include "csd/kernel_config.hpp"
#include "csd/types.hpp"

namespace csd::device {

enum class PathKind { kPeerToPeer, kHostMediated };

// Endpoint on the non-flash side of a transfer.
enum class Locus { kHost, kDevice };

enum class KernelMode { kHardware, kSoftware };

struct TransferPath {
  u64 bandwidth_bps = 3'000'000'000;  // bytes per second
  u64 fixed_overhead_ns = 30'000;
  // Extra serialized copy cost on the host-mediated path, bytes per second.
  // 0 disables the term (the default: both paths perform alike).
  u64 host_copy_penalty_bps = 0;
};

struct KernelAnchor {
  u32 dim = 0;          // square matrix dimension n
  double seconds = 0.0; // end-to-end kernel processing time at that n
};

// Calibrated cost model for transfers and kernel launches.
//
// Transfers are affine in the byte count: fixed_overhead + bytes/bandwidth,
// rounded up to whole nanoseconds. Kernel times interpolate piecewise-linearly
// in n^3 between measured anchors; below the first anchor the segment runs to
// the origin (zero work takes zero time), above the last the final slope is
// kept. Hardware launches additionally scale by (unroll_reference/unroll)^eta,
// the unroll-vs-clock tradeoff of the synthesized design.
struct TimingModel {
  TransferPath p2p;
  TransferPath host;
  std::vector<KernelAnchor> hw_anchors;
  std::vector<KernelAnchor> sw_anchors;
  double unroll_reference = 256.0;
  double unroll_exponent = 0.8;  // eta < 1: doubling unroll has diminishing returns
  double jitter_fraction = 0.01;
  u32 max_hw_dim = 1536;  // hardware synthesis cap; launches above it are rejected

  static TimingModel with_defaults();

  const TransferPath& path(PathKind kind) const {
    return kind == PathKind::kPeerToPeer ? p2p : host;
  }

  // Nominal (jitter-free) transfer duration. Jitter, when enabled, is applied
  // by the device as commands are billed, not here.
  u64 transfer_time_ns(u64 bytes, PathKind kind) const;

  u64 kernel_time_ns(u32 n, KernelMode mode, const KernelConfig& cfg) const;

  // Throws InvalidConfig if anchors are unsorted, too few, or non-increasing.
  void validate() const;
};

}  // namespace csd::device
