// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <mutex>
#include <span>

#include "csd/device/dram.hpp"
#include "csd/device/flash.hpp"
#include "csd/device/hooks.hpp"
#include "csd/device/timing.hpp"
#include "csd/util/rng.hpp"

namespace csd::device {

struct DeviceConfig {
  u32 block_size = 4096;
  u64 num_blocks = 16384;
  u64 dram_capacity = 4ULL * 1024 * 1024 * 1024;
  TimingModel timing = TimingModel::with_defaults();
  u64 jitter_seed = 0;
};

// Byte counters tagged by whether traffic crossed the host boundary. Intra
// traffic covers p2p flash<->DRAM moves and shadow-copy motion.
struct PathCounters {
  u64 host_bytes = 0;
  u64 intra_bytes = 0;
  u64 blocks_read = 0;
  u64 blocks_written = 0;
};

// The simulated CSD: flash namespace, device DRAM, the two data paths, a
// deterministic clock, and the interception point at the bottom of the stack.
//
// Commands apply in submission order on one timeline; the handle may be
// shared across threads, and each command's effects and clock advancement are
// serialized. With a fixed jitter seed, identical command sequences produce
// identical timings and state.
class Device {
 public:
  struct IoTiming {
    u64 submit_ns = 0;
    u64 start_ns = 0;
    u64 end_ns = 0;
    u64 elapsed_ns() const { return end_ns - start_ns; }
  };

  explicit Device(DeviceConfig cfg = {});

  const DeviceConfig& config() const { return cfg_; }
  u32 block_size() const { return cfg_.block_size; }
  u64 now_ns() const;
  PathCounters counters() const;

  // Reads count blocks starting at lba. The destination locus decides the
  // route: p2p lands in device DRAM directly; the host-mediated path bounces
  // device-bound data through a host buffer (two clock advances). P2P to a
  // host destination is not a route the fabric offers.
  std::pair<std::vector<std::byte>, IoTiming> read_blocks(u64 lba, u64 count,
                                                          PathKind path, Locus dest);

  // Writes count blocks; data length must be count * block_size. Pre-write
  // interceptors see every block before the store mutates; a fail verdict
  // rejects the whole command and nothing lands.
  IoTiming write_blocks(u64 lba, u64 count, std::span<const std::byte> data,
                        PathKind path, Locus src);

  // Nominal affine transfer cost (no jitter): overhead + bytes/bandwidth,
  // plus the host-copy term when enabled on the host-mediated path.
  u64 transfer_time_ns(u64 bytes, PathKind kind) const;

  u64 kernel_time_ns(u32 n, KernelMode mode, const KernelConfig& cfg) const;

  // Timing-only commands: advance the clock and counters exactly as the real
  // operation would, without moving payload bytes. Benchmark repetitions use
  // these so that statistics do not require re-copying gigabytes.
  IoTiming bill_transfer(u64 bytes, PathKind path, Locus other_end);
  IoTiming bill_kernel(u32 n, KernelMode mode, const KernelConfig& cfg);

  // Firmware-internal block write: bypasses interceptors, billed as an
  // intra-device move. Used by shadow-copy recovery.
  IoTiming restore_block(u64 lba, std::span<const std::byte> payload);

  u64 add_hook(HookStage stage, int priority, PreWriteHook hook);
  u64 add_hook(HookStage stage, int priority, PostReadHook hook);
  void remove_hook(u64 hook_id);

  // State inspection (unbilled).
  bool lba_live(u64 lba) const;
  u64 lba_epoch(u64 lba) const;
  u64 lba_written_at(u64 lba) const;
  std::vector<std::byte> peek_block(u64 lba) const;
  u64 num_live_blocks() const;
  void for_each_live_block(
      const std::function<void(u64, const FlashNamespace::Block&)>& fn) const;

  DramAllocator& dram() { return dram_; }

  void save_snapshot(const std::filesystem::path& path) const;
  void load_snapshot(const std::filesystem::path& path);

 private:
  friend class DeviceContext;

  struct HookEntry {
    u64 id;
    int priority;
    u64 seq;  // registration order breaks priority ties
    PreWriteHook pre_write;
    PostReadHook post_read;
  };

  // Unlocked internals; callers hold mu_.
  u64 bill_hop_locked(u64 bytes, PathKind kind, bool crosses_host);
  u64 jittered_locked(u64 nominal_ns);
  std::vector<const HookEntry*> ordered_hooks_locked(HookStage stage) const;
  u64 intra_transfer_locked(u64 bytes);

  DeviceConfig cfg_;
  FlashNamespace flash_;
  DramAllocator dram_;
  util::Rng jitter_rng_;
  u64 clock_ns_ = 0;
  u64 pending_delay_ns_ = 0;  // accumulated by Delay hooks within one command
  PathCounters counters_{};
  std::vector<HookEntry> pre_write_hooks_;
  std::vector<HookEntry> post_read_hooks_;
  u64 next_hook_id_ = 1;
  u64 hook_seq_ = 0;
  mutable std::recursive_mutex mu_;
};

}  // namespace csd::device
