// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/rdr/monitor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "json.hpp"

namespace csd::rdr {

using device::DeviceContext;
using device::ReadResponse;
using device::ReadVerdict;
using device::WriteRequest;
using device::WriteVerdict;

double shannon_entropy_bits_per_byte(std::span<const std::byte> data) {
  if (data.empty()) return 0.0;
  std::array<u64, 256> counts{};
  for (std::byte b : data) ++counts[static_cast<u8>(b)];
  const double total = static_cast<double>(data.size());
  double h = 0.0;
  for (u64 c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

const char* threat_level_name(ThreatLevel level) {
  switch (level) {
    case ThreatLevel::kBenign: return "benign";
    case ThreatLevel::kSuspicious: return "suspicious";
    case ThreatLevel::kRansomware: return "ransomware";
  }
  return "benign";
}

void MonitorConfig::validate() const {
  if (window < 1) {
    throw_error(ErrorCode::kInvalidConfig, "window must be at least 1");
  }
  if (weight_entropy < 0 || weight_overwrite < 0 || weight_read_overwrite < 0) {
    throw_error(ErrorCode::kInvalidConfig, "negative feature weight");
  }
  if (suspicious_threshold > ransomware_threshold) {
    throw_error(ErrorCode::kInvalidConfig, "suspicious threshold above ransomware threshold");
  }
}

std::string serialize_recovery_report(const RecoveryReport& report) {
  nlohmann::json j{{"blocks_restored", report.blocks_restored},
                   {"bytes_moved", report.bytes_moved},
                   {"elapsed_ns", report.elapsed_ns},
                   {"unrecoverable_lbas", report.unrecoverable_lbas}};
  return j.dump(2) + "\n";
}

std::string serialize_verdicts(const std::vector<DetectionVerdict>& verdicts) {
  std::string out;
  for (const DetectionVerdict& v : verdicts) {
    nlohmann::json j{{"record_index", v.record_index},
                     {"level", threat_level_name(v.level)},
                     {"score", v.score},
                     {"mean_write_entropy", v.features.mean_write_entropy},
                     {"overwrite_ratio", v.features.overwrite_ratio},
                     {"read_then_overwrite", v.features.read_then_overwrite_count},
                     {"distinct_lbas", v.features.distinct_lbas}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

Monitor::Monitor(api::Session& session, MonitorConfig cfg, int priority)
    : session_(session), cfg_(cfg), shadow_(cfg.shadow_budget) {
  cfg_.validate();
  pre_hook_ = session_
                  .register_interceptor(priority,
                                        device::PreWriteHook([this](WriteRequest& req,
                                                                    DeviceContext& ctx) {
                                          return on_write(req, ctx);
                                        }))
                  .hook_id;
  post_hook_ = session_
                   .register_interceptor(priority,
                                         device::PostReadHook([this](ReadResponse& resp,
                                                                     DeviceContext& ctx) {
                                           return on_read(resp, ctx);
                                         }))
                   .hook_id;
  installed_ = true;
}

Monitor::~Monitor() {
  try {
    uninstall();
  } catch (...) {
    // Destructor must not throw.
  }
}

void Monitor::uninstall() {
  if (!installed_) return;
  installed_ = false;
  session_.unregister_interceptor(pre_hook_);
  session_.unregister_interceptor(post_hook_);
}

WindowStats Monitor::compute_stats() const {
  WindowStats stats;
  u32 writes = 0;
  u32 overwrites = 0;
  double entropy_sum = 0.0;
  std::set<u64> lbas;
  std::set<u64> reads_before;  // LBAs read earlier in the window
  for (const IoRecord& rec : window_) {
    lbas.insert(rec.lba);
    if (rec.kind == IoRecord::Kind::kRead) {
      reads_before.insert(rec.lba);
      continue;
    }
    ++writes;
    entropy_sum += rec.entropy;
    if (rec.overwrote_live) {
      ++overwrites;
      if (reads_before.contains(rec.lba)) ++stats.read_then_overwrite_count;
    }
  }
  if (writes > 0) {
    stats.mean_write_entropy = entropy_sum / writes;
    stats.overwrite_ratio = static_cast<double>(overwrites) / writes;
  }
  stats.distinct_lbas = static_cast<u32>(lbas.size());
  return stats;
}

std::optional<DetectionVerdict> Monitor::push_record(const IoRecord& record) {
  window_.push_back(record);
  if (window_.size() > cfg_.window) window_.pop_front();
  const u64 index = records_seen_++;
  if (window_.size() < cfg_.window) return std::nullopt;

  DetectionVerdict verdict;
  verdict.record_index = index;
  verdict.features = compute_stats();
  verdict.score = cfg_.weight_entropy * (verdict.features.mean_write_entropy / 8.0) +
                  cfg_.weight_overwrite * verdict.features.overwrite_ratio +
                  cfg_.weight_read_overwrite *
                      (static_cast<double>(verdict.features.read_then_overwrite_count) /
                       cfg_.window);
  if (verdict.score >= cfg_.ransomware_threshold) {
    verdict.level = ThreatLevel::kRansomware;
  } else if (verdict.score >= cfg_.suspicious_threshold) {
    verdict.level = ThreatLevel::kSuspicious;
  } else {
    verdict.level = ThreatLevel::kBenign;
  }
  verdicts_.push_back(verdict);
  if (verdict.level == ThreatLevel::kRansomware && cfg_.freeze != FreezePolicy::kNone) {
    frozen_ = true;
  }
  return verdict;
}

std::optional<DetectionVerdict> Monitor::observe(const IoRecord& record) {
  return push_record(record);
}

void Monitor::retain_with(u64 lba, u64 epoch, u64 content_written_at, u64 retained_at,
                          std::vector<std::byte> payload) {
  ShadowStore::Entry entry;
  entry.lba = lba;
  entry.epoch = epoch;
  entry.content_written_at = content_written_at;
  entry.retained_at = retained_at;
  entry.payload = std::move(payload);
  shadow_.insert(std::move(entry));
}

WriteVerdict Monitor::on_write(WriteRequest& req, DeviceContext& ctx) {
  if (frozen_ && cfg_.freeze == FreezePolicy::kBlock) {
    return WriteVerdict::fail(ErrorCode::kDeviceFrozen);
  }
  if (req.overwrites_live &&
      (cfg_.retain_on_overwrite || (frozen_ && cfg_.freeze == FreezePolicy::kRetainAll))) {
    if (!shadow_.contains(req.lba, req.live_epoch)) {
      std::vector<std::byte> pre_image = ctx.peek_block(req.lba);
      const u64 bytes = pre_image.size();
      retain_with(req.lba, req.live_epoch, ctx.lba_written_at(req.lba), ctx.now_ns(),
                  std::move(pre_image));
      ctx.bill_intra_transfer(bytes);
    }
  }
  IoRecord rec;
  rec.kind = IoRecord::Kind::kWrite;
  rec.lba = req.lba;
  rec.overwrote_live = req.overwrites_live;
  rec.entropy = shannon_entropy_bits_per_byte(req.payload);
  push_record(rec);
  return WriteVerdict::pass();
}

ReadVerdict Monitor::on_read(ReadResponse& resp, DeviceContext&) {
  IoRecord rec;
  rec.kind = IoRecord::Kind::kRead;
  rec.lba = resp.lba;
  push_record(rec);
  return ReadVerdict::pass();
}

u64 Monitor::retain_preimage(u64 lba) {
  device::Device& dev = session_.device();
  if (!dev.lba_live(lba)) {
    throw_error(ErrorCode::kInvalidConfig,
                "lba " + std::to_string(lba) + " has no live content to retain");
  }
  const u64 epoch = dev.lba_epoch(lba);
  if (shadow_.contains(lba, epoch)) return 0;
  std::vector<std::byte> pre_image = dev.peek_block(lba);
  const u64 bytes = pre_image.size();
  retain_with(lba, epoch, dev.lba_written_at(lba), dev.now_ns(), std::move(pre_image));
  auto t = dev.bill_transfer(bytes, device::PathKind::kPeerToPeer, device::Locus::kDevice);
  return t.elapsed_ns();
}

RecoveryReport Monitor::recover_to(u64 t) {
  device::Device& dev = session_.device();
  std::vector<u64> candidates;
  dev.for_each_live_block([&](u64 lba, const device::FlashNamespace::Block& blk) {
    if (blk.written_at_ns > t) candidates.push_back(lba);
  });
  if (candidates.empty()) {
    throw_error(ErrorCode::kNothingToRecover,
                "no live block was written after t=" + std::to_string(t));
  }
  RecoveryReport report;
  const u64 started = dev.now_ns();
  for (u64 lba : candidates) {
    const ShadowStore::Entry* entry = shadow_.newest_at_or_before(lba, t);
    if (entry == nullptr) {
      report.unrecoverable_lbas.push_back(lba);
      continue;
    }
    dev.restore_block(lba, entry->payload);
    ++report.blocks_restored;
    report.bytes_moved += entry->payload.size();
  }
  report.elapsed_ns = dev.now_ns() - started;
  return report;
}

void Monitor::release_freeze() { frozen_ = false; }

}  // namespace csd::rdr
