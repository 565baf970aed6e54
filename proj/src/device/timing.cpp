// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/device/timing.hpp"

#include <cmath>

namespace csd::device {

TimingModel TimingModel::with_defaults() {
  TimingModel m;
  m.p2p = TransferPath{};
  m.host = TransferPath{};
  // Measured software kernel times at 576 KiB and 9 MiB inputs; the hardware
  // kernel completes the small size in 18 ms and trails off to a 1.4x
  // advantage at the large one.
  m.sw_anchors = {{384, 0.062}, {1536, 2.876}};
  m.hw_anchors = {{384, 0.018}, {1536, 2.876 / 1.4}};
  return m;
}

u64 TimingModel::transfer_time_ns(u64 bytes, PathKind kind) const {
  const TransferPath& p = path(kind);
  // ceil(bytes * 1e9 / bandwidth); operands stay well inside u64 for any
  // realistic transfer (< 18 EB·ns).
  auto ceil_div = [](u64 num, u64 den) { return (num + den - 1) / den; };
  u64 t = p.fixed_overhead_ns;
  if (bytes > 0) {
    t += ceil_div(bytes * 1'000'000'000ULL, p.bandwidth_bps);
    if (kind == PathKind::kHostMediated && p.host_copy_penalty_bps > 0) {
      t += ceil_div(bytes * 1'000'000'000ULL, p.host_copy_penalty_bps);
    }
  }
  return t;
}

u64 TimingModel::kernel_time_ns(u32 n, KernelMode mode, const KernelConfig& cfg) const {
  if (n < 1) throw_error(ErrorCode::kUnsupportedSize, "kernel dimension must be >= 1");
  if (!cfg.valid()) throw_error(ErrorCode::kInvalidConfig, "kernel config out of bounds");
  const auto& anchors = mode == KernelMode::kHardware ? hw_anchors : sw_anchors;
  if (anchors.size() < 2) {
    throw_error(ErrorCode::kInvalidConfig, "need at least two kernel anchors");
  }
  if (mode == KernelMode::kHardware && n > max_hw_dim) {
    throw_error(ErrorCode::kUnsupportedSize,
                "dimension " + std::to_string(n) + " exceeds the synthesizable maximum " +
                    std::to_string(max_hw_dim),
                static_cast<int>(n));
  }

  const double x = std::pow(static_cast<double>(n), 3.0);
  auto cube = [](u32 d) { return std::pow(static_cast<double>(d), 3.0); };

  double seconds;
  if (x <= cube(anchors.front().dim)) {
    // Segment through the origin keeps the model positive and increasing for
    // sizes below the smallest measured input.
    seconds = anchors.front().seconds * (x / cube(anchors.front().dim));
  } else if (x >= cube(anchors.back().dim)) {
    size_t last = anchors.size() - 1;
    double x0 = cube(anchors[last - 1].dim), x1 = cube(anchors[last].dim);
    double slope = (anchors[last].seconds - anchors[last - 1].seconds) / (x1 - x0);
    seconds = anchors[last].seconds + slope * (x - x1);
  } else {
    size_t hi = 1;
    while (cube(anchors[hi].dim) < x) ++hi;
    double x0 = cube(anchors[hi - 1].dim), x1 = cube(anchors[hi].dim);
    double t0 = anchors[hi - 1].seconds, t1 = anchors[hi].seconds;
    seconds = t0 + (t1 - t0) * (x - x0) / (x1 - x0);
  }

  if (mode == KernelMode::kHardware) {
    seconds *= std::pow(unroll_reference / static_cast<double>(cfg.unroll_factor),
                        unroll_exponent);
  }
  u64 ns = static_cast<u64>(std::llround(seconds * 1e9));
  return ns > 0 ? ns : 1;
}

void TimingModel::validate() const {
  for (const auto* anchors : {&hw_anchors, &sw_anchors}) {
    if (anchors->size() < 2) {
      throw_error(ErrorCode::kInvalidConfig, "anchor tables need >= 2 entries");
    }
    for (size_t i = 1; i < anchors->size(); ++i) {
      if ((*anchors)[i].dim <= (*anchors)[i - 1].dim ||
          (*anchors)[i].seconds <= (*anchors)[i - 1].seconds) {
        throw_error(ErrorCode::kInvalidConfig, "anchors must increase in dim and time");
      }
    }
    if (anchors->front().seconds <= 0.0) {
      throw_error(ErrorCode::kInvalidConfig, "anchor times must be positive");
    }
  }
  if (p2p.bandwidth_bps == 0 || host.bandwidth_bps == 0) {
    throw_error(ErrorCode::kInvalidConfig, "bandwidth must be positive");
  }
  if (jitter_fraction < 0.0 || jitter_fraction >= 1.0) {
    throw_error(ErrorCode::kInvalidConfig, "jitter fraction must be in [0, 1)");
  }
  if (unroll_exponent <= 0.0 || unroll_exponent >= 1.0) {
    throw_error(ErrorCode::kInvalidConfig, "unroll exponent must be in (0, 1)");
  }
}

}  // namespace csd::device
