// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <optional>

#include "csd/api/session.hpp"
#include "csd/rdr/shadow.hpp"

namespace csd::rdr {

// Shannon entropy of the byte distribution, in bits per byte. Empty data
// scores 0.
double shannon_entropy_bits_per_byte(std::span<const std::byte> data);

enum class ThreatLevel { kBenign, kSuspicious, kRansomware };

const char* threat_level_name(ThreatLevel level);

enum class FreezePolicy { kNone, kBlock, kRetainAll };

struct MonitorConfig {
  u32 window = 64;
  double weight_entropy = 0.5;
  double weight_overwrite = 0.3;
  double weight_read_overwrite = 0.2;
  double suspicious_threshold = 0.5;
  double ransomware_threshold = 0.7;
  u64 shadow_budget = 64ULL * 1024 * 1024;
  bool retain_on_overwrite = true;
  FreezePolicy freeze = FreezePolicy::kNone;

  void validate() const;
};

// One I/O as the monitor sees it. Write entropy is computed over the payload
// as submitted, before any downstream interceptor mutates it.
struct IoRecord {
  enum class Kind { kRead, kWrite };
  Kind kind = Kind::kRead;
  u64 lba = 0;
  bool overwrote_live = false;  // writes only
  double entropy = 0.0;         // writes only, bits/byte
};

// Features of the current window. All derivable from the raw records, and
// recomputed per verdict so a read sliding out of the window stops counting.
struct WindowStats {
  double mean_write_entropy = 0.0;
  double overwrite_ratio = 0.0;
  u32 read_then_overwrite_count = 0;
  u32 distinct_lbas = 0;
};

struct DetectionVerdict {
  ThreatLevel level = ThreatLevel::kBenign;
  double score = 0.0;
  u64 record_index = 0;  // 0-based ordinal of the newest record in the window
  WindowStats features;
};

struct RecoveryReport {
  u64 blocks_restored = 0;
  u64 bytes_moved = 0;
  u64 elapsed_ns = 0;
  std::vector<u64> unrecoverable_lbas;
};

std::string serialize_recovery_report(const RecoveryReport& report);

// JSONL, one verdict per line with its window features.
std::string serialize_verdicts(const std::vector<DetectionVerdict>& verdicts);

// Write-stream monitor plus pre-image retention and recovery. Installs a
// pre-write and a post-read interceptor (default priority 10, ahead of the
// fault engine's 100, so it observes I/O as the workload submitted it).
class Monitor {
 public:
  Monitor(api::Session& session, MonitorConfig cfg, int priority = 10);
  ~Monitor();

  Monitor(const Monitor&) = delete;
  Monitor& operator=(const Monitor&) = delete;

  const MonitorConfig& config() const { return cfg_; }
  const ShadowStore& shadow() const { return shadow_; }
  const std::vector<DetectionVerdict>& verdicts() const { return verdicts_; }
  bool frozen() const { return frozen_; }

  // Feeds one record into the sliding window; emits a verdict once the
  // window is full. The interceptors call this on the device timeline;
  // calling it directly replays a trace without a device.
  std::optional<DetectionVerdict> observe(const IoRecord& record);

  // Copies the block's live content into the shadow store over the
  // intra-device path. Returns the billed time (0 when already retained).
  u64 retain_preimage(u64 lba);

  // Restores every live block overwritten after t to its newest retained
  // pre-image from at-or-before t. NothingToRecover when no block postdates
  // t. All movement is intra-device.
  RecoveryReport recover_to(u64 t);

  void release_freeze();
  void uninstall();

 private:
  device::WriteVerdict on_write(device::WriteRequest& req, device::DeviceContext& ctx);
  device::ReadVerdict on_read(device::ReadResponse& resp, device::DeviceContext& ctx);
  std::optional<DetectionVerdict> push_record(const IoRecord& record);
  WindowStats compute_stats() const;
  void retain_with(u64 lba, u64 epoch, u64 content_written_at, u64 retained_at,
                   std::vector<std::byte> payload);

  api::Session& session_;
  MonitorConfig cfg_;
  ShadowStore shadow_;
  std::deque<IoRecord> window_;
  u64 records_seen_ = 0;
  std::vector<DetectionVerdict> verdicts_;
  bool frozen_ = false;
  u64 pre_hook_ = 0;
  u64 post_hook_ = 0;
  bool installed_ = false;
};

}  // namespace csd::rdr
