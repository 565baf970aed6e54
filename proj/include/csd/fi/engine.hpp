// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>

#include "csd/api/session.hpp"
#include "csd/fi/rules.hpp"
#include "csd/util/rng.hpp"

namespace csd::fi {

// One applied action. `op` is "read" or "write"; `action` is the canonical
// rendering of what was done, parameters included.
struct InjectionRecord {
  u64 time_ns = 0;
  std::string rule_id;
  u64 lba = 0;
  std::string op;
  std::string action;

  bool operator==(const InjectionRecord&) const = default;
};

using InjectionLog = std::vector<InjectionRecord>;

std::string serialize_injection_log(const InjectionLog& log);  // JSONL

// Installs the plan's rules as one pre-write and one post-read interceptor.
// Rules evaluate in plan order against every matching block; all fired
// actions are logged, then the verdict is derived (drop beats mutate, the
// first read_error wins). Identical (plan, workload) pairs produce identical
// logs: per-rule counters and generators are seeded from plan.seed.
class FaultEngine {
 public:
  FaultEngine(api::Session& session, FaultPlan plan, int priority = 100);
  ~FaultEngine();

  FaultEngine(const FaultEngine&) = delete;
  FaultEngine& operator=(const FaultEngine&) = delete;

  const InjectionLog& log() const { return log_; }
  void uninstall();

 private:
  struct RuleState {
    FaultRule rule;
    u64 matched = 0;  // per-rule ordinal of matching accesses
    util::Rng rng;
  };

  bool should_fire(RuleState& st);
  device::WriteVerdict on_write(device::WriteRequest& req, device::DeviceContext& ctx);
  device::ReadVerdict on_read(device::ReadResponse& resp, device::DeviceContext& ctx);

  api::Session& session_;
  std::vector<RuleState> states_;
  InjectionLog log_;
  u64 pre_hook_ = 0;
  u64 post_hook_ = 0;
  bool installed_ = false;
};

// FNV-1a digest of one block's content.
u64 block_digest(std::span<const std::byte> payload);

// Digests of every live block, keyed by LBA. Unbilled: this is the victim's
// offline verification pass, not device traffic.
std::map<u64, u64> digest_live_blocks(device::Device& dev);

// LBAs whose current digest differs from `expected` (recorded before the
// faulted run), including blocks that appeared or vanished since.
std::vector<u64> checksum_scan(device::Device& dev, const std::map<u64, u64>& expected);

}  // namespace csd::fi
