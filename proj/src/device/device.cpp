// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/device/device.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace csd::device {
namespace {

struct HopPlan {
  int host_hops = 0;
  int intra_hops = 0;
};

// A transfer command decomposes into bus hops. Peer-to-peer moves stay inside
// the device (one hop); the host-mediated path bounces device-bound data
// through host memory (two hops). P2P cannot terminate in host memory.
HopPlan plan_hops(PathKind path, Locus other_end) {
  if (path == PathKind::kPeerToPeer) {
    if (other_end == Locus::kHost) {
      throw_error(ErrorCode::kPathNotPermitted,
                  "peer-to-peer transfers terminate in device DRAM, not host memory");
    }
    return {0, 1};
  }
  return other_end == Locus::kHost ? HopPlan{1, 0} : HopPlan{2, 0};
}

constexpr char kSnapshotMagic[4] = {'C', 'S', 'D', 'G'};
constexpr u32 kSnapshotVersion = 1;

struct SnapshotHeader {
  char magic[4];
  u32 version;
  u64 block_size;
  u64 num_blocks;
  char reserved[40];
};
static_assert(sizeof(SnapshotHeader) == 64);

}  // namespace

Device::Device(DeviceConfig cfg)
    : cfg_(cfg),
      flash_(cfg.block_size, cfg.num_blocks),
      dram_(cfg.dram_capacity),
      jitter_rng_(cfg.jitter_seed) {
  cfg_.timing.validate();
}

u64 Device::now_ns() const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return clock_ns_;
}

PathCounters Device::counters() const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return counters_;
}

u64 Device::jittered_locked(u64 nominal_ns) {
  double j = cfg_.timing.jitter_fraction;
  if (j <= 0.0 || nominal_ns == 0) return nominal_ns;
  double factor = 1.0 - j + 2.0 * j * jitter_rng_.next_double();
  auto scaled = static_cast<u64>(std::llround(static_cast<double>(nominal_ns) * factor));
  return std::max<u64>(scaled, 1);
}

u64 Device::bill_hop_locked(u64 bytes, PathKind kind, bool crosses_host) {
  u64 billed = jittered_locked(cfg_.timing.transfer_time_ns(bytes, kind));
  clock_ns_ += billed;
  (crosses_host ? counters_.host_bytes : counters_.intra_bytes) += bytes;
  return billed;
}

u64 Device::intra_transfer_locked(u64 bytes) {
  return bill_hop_locked(bytes, PathKind::kPeerToPeer, false);
}

std::vector<const Device::HookEntry*> Device::ordered_hooks_locked(HookStage stage) const {
  const auto& src = stage == HookStage::kPreWrite ? pre_write_hooks_ : post_read_hooks_;
  std::vector<const HookEntry*> out;
  out.reserve(src.size());
  for (const auto& e : src) out.push_back(&e);
  std::stable_sort(out.begin(), out.end(), [](const HookEntry* a, const HookEntry* b) {
    return a->priority < b->priority;
  });
  return out;
}

std::pair<std::vector<std::byte>, Device::IoTiming> Device::read_blocks(u64 lba, u64 count,
                                                                        PathKind path,
                                                                        Locus dest) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  flash_.check_range(lba, count);
  IoTiming t{clock_ns_, clock_ns_, clock_ns_};
  std::vector<std::byte> out(count * static_cast<u64>(cfg_.block_size));
  if (count == 0) return {std::move(out), t};

  HopPlan hops = plan_hops(path, dest);
  u64 bytes = out.size();
  for (int i = 0; i < hops.host_hops; ++i) bill_hop_locked(bytes, PathKind::kHostMediated, true);
  for (int i = 0; i < hops.intra_hops; ++i) bill_hop_locked(bytes, PathKind::kPeerToPeer, false);
  counters_.blocks_read += count;

  auto chain = ordered_hooks_locked(HookStage::kPostRead);
  pending_delay_ns_ = 0;
  DeviceContext ctx(*this);
  for (u64 i = 0; i < count; ++i) {
    std::span<std::byte> blk(out.data() + i * cfg_.block_size, cfg_.block_size);
    flash_.read_block(lba + i, blk);
    if (chain.empty()) continue;
    std::vector<std::byte> payload(blk.begin(), blk.end());
    ReadResponse resp{lba + i, payload, flash_.is_live(lba + i), clock_ns_, path};
    for (const HookEntry* h : chain) {
      ReadVerdict v = h->post_read(resp, ctx);
      if (v.kind == ReadVerdict::Kind::kFail) {
        clock_ns_ += pending_delay_ns_;
        pending_delay_ns_ = 0;
        throw Error(v.error, "read of lba " + std::to_string(lba + i) +
                                 " failed by interceptor",
                    v.detail);
      }
    }
    if (payload.size() != cfg_.block_size) {
      throw_error(ErrorCode::kBufferShapeMismatch,
                  "interceptor resized a read payload");
    }
    std::copy(payload.begin(), payload.end(), blk.begin());
  }
  clock_ns_ += pending_delay_ns_;
  pending_delay_ns_ = 0;
  t.end_ns = clock_ns_;
  return {std::move(out), t};
}

Device::IoTiming Device::write_blocks(u64 lba, u64 count, std::span<const std::byte> data,
                                      PathKind path, Locus src) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  flash_.check_range(lba, count);
  if (data.size() != count * static_cast<u64>(cfg_.block_size)) {
    throw_error(ErrorCode::kMisalignedLength,
                "write of " + std::to_string(data.size()) + " bytes is not " +
                    std::to_string(count) + " blocks of " +
                    std::to_string(cfg_.block_size));
  }
  IoTiming t{clock_ns_, clock_ns_, clock_ns_};
  if (count == 0) return t;

  HopPlan hops = plan_hops(path, src);
  for (int i = 0; i < hops.host_hops; ++i)
    bill_hop_locked(data.size(), PathKind::kHostMediated, true);
  for (int i = 0; i < hops.intra_hops; ++i)
    bill_hop_locked(data.size(), PathKind::kPeerToPeer, false);

  // Two phases: every block runs the full pre-write chain first, then the
  // survivors commit. A fail verdict rejects the whole command with no store
  // mutation; hook-billed work (shadow copies, delays) stands, since the
  // device really performed it before rejecting.
  auto chain = ordered_hooks_locked(HookStage::kPreWrite);
  pending_delay_ns_ = 0;
  DeviceContext ctx(*this);
  std::vector<std::pair<u64, std::vector<std::byte>>> staged;
  staged.reserve(count);
  for (u64 i = 0; i < count; ++i) {
    std::vector<std::byte> payload(data.begin() + i * cfg_.block_size,
                                   data.begin() + (i + 1) * cfg_.block_size);
    bool dropped = false;
    if (!chain.empty()) {
      bool live = flash_.is_live(lba + i);
      WriteRequest req{lba + i, payload, live, live ? flash_.epoch_of(lba + i) : 0,
                       clock_ns_, path};
      for (const HookEntry* h : chain) {
        WriteVerdict v = h->pre_write(req, ctx);
        if (v.kind == WriteVerdict::Kind::kDrop) dropped = true;
        if (v.kind == WriteVerdict::Kind::kFail) {
          clock_ns_ += pending_delay_ns_;
          pending_delay_ns_ = 0;
          throw Error(v.error, "write to lba " + std::to_string(lba + i) +
                                   " rejected by interceptor",
                      v.detail);
        }
      }
      if (payload.size() != cfg_.block_size) {
        throw_error(ErrorCode::kBufferShapeMismatch,
                    "interceptor resized a write payload");
      }
    }
    if (!dropped) staged.emplace_back(lba + i, std::move(payload));
  }
  clock_ns_ += pending_delay_ns_;
  pending_delay_ns_ = 0;
  for (auto& [blk_lba, payload] : staged) {
    flash_.commit_block(blk_lba, payload, clock_ns_);
    ++counters_.blocks_written;
  }
  t.end_ns = clock_ns_;
  return t;
}

u64 Device::transfer_time_ns(u64 bytes, PathKind kind) const {
  return cfg_.timing.transfer_time_ns(bytes, kind);
}

u64 Device::kernel_time_ns(u32 n, KernelMode mode, const KernelConfig& cfg) const {
  return cfg_.timing.kernel_time_ns(n, mode, cfg);
}

Device::IoTiming Device::bill_transfer(u64 bytes, PathKind path, Locus other_end) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  IoTiming t{clock_ns_, clock_ns_, clock_ns_};
  HopPlan hops = plan_hops(path, other_end);
  for (int i = 0; i < hops.host_hops; ++i) bill_hop_locked(bytes, PathKind::kHostMediated, true);
  for (int i = 0; i < hops.intra_hops; ++i) bill_hop_locked(bytes, PathKind::kPeerToPeer, false);
  t.end_ns = clock_ns_;
  return t;
}

Device::IoTiming Device::bill_kernel(u32 n, KernelMode mode, const KernelConfig& cfg) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  IoTiming t{clock_ns_, clock_ns_, clock_ns_};
  // Kernels run from on-chip state on a fixed clock; their duration carries
  // no jitter, matching the much tighter run-to-run spread of kernel times.
  clock_ns_ += cfg_.timing.kernel_time_ns(n, mode, cfg);
  t.end_ns = clock_ns_;
  return t;
}

Device::IoTiming Device::restore_block(u64 lba, std::span<const std::byte> payload) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  flash_.check_range(lba, 1);
  IoTiming t{clock_ns_, clock_ns_, clock_ns_};
  intra_transfer_locked(payload.size());
  flash_.commit_block(lba, payload, clock_ns_);
  ++counters_.blocks_written;
  t.end_ns = clock_ns_;
  return t;
}

u64 Device::add_hook(HookStage stage, int priority, PreWriteHook hook) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (stage != HookStage::kPreWrite) {
    throw_error(ErrorCode::kInvalidConfig, "write hook registered for a read stage");
  }
  u64 id = next_hook_id_++;
  pre_write_hooks_.push_back({id, priority, hook_seq_++, std::move(hook), nullptr});
  return id;
}

u64 Device::add_hook(HookStage stage, int priority, PostReadHook hook) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (stage != HookStage::kPostRead) {
    throw_error(ErrorCode::kInvalidConfig, "read hook registered for a write stage");
  }
  u64 id = next_hook_id_++;
  post_read_hooks_.push_back({id, priority, hook_seq_++, nullptr, std::move(hook)});
  return id;
}

void Device::remove_hook(u64 hook_id) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto drop_from = [hook_id](std::vector<HookEntry>& v) {
    auto it = std::find_if(v.begin(), v.end(),
                           [hook_id](const HookEntry& e) { return e.id == hook_id; });
    if (it == v.end()) return false;
    v.erase(it);
    return true;
  };
  if (!drop_from(pre_write_hooks_) && !drop_from(post_read_hooks_)) {
    throw_error(ErrorCode::kUnknownHookId, "no hook with id " + std::to_string(hook_id));
  }
}

bool Device::lba_live(u64 lba) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return flash_.is_live(lba);
}

u64 Device::lba_epoch(u64 lba) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return flash_.epoch_of(lba);
}

u64 Device::lba_written_at(u64 lba) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return flash_.written_at(lba);
}

std::vector<std::byte> Device::peek_block(u64 lba) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return flash_.peek_block(lba);
}

u64 Device::num_live_blocks() const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return flash_.blocks().size();
}

void Device::for_each_live_block(
    const std::function<void(u64, const FlashNamespace::Block&)>& fn) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  flash_.for_each_live(fn);
}

void Device::save_snapshot(const std::filesystem::path& path) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw_error(ErrorCode::kMissingPath, "cannot open " + path.string() + " for writing");
  }
  SnapshotHeader hdr{};
  std::memcpy(hdr.magic, kSnapshotMagic, 4);
  hdr.version = kSnapshotVersion;
  hdr.block_size = cfg_.block_size;
  hdr.num_blocks = cfg_.num_blocks;
  out.write(reinterpret_cast<const char*>(&hdr), sizeof(hdr));
  // Liveness bitmap, then every block's content (zeroes when unwritten).
  // The bitmap distinguishes a written all-zero block from a never-written
  // one, which raw content alone cannot.
  std::vector<u8> bitmap((cfg_.num_blocks + 7) / 8, 0);
  for (u64 lba = 0; lba < cfg_.num_blocks; ++lba) {
    if (flash_.is_live(lba)) bitmap[lba / 8] |= static_cast<u8>(1u << (lba % 8));
  }
  out.write(reinterpret_cast<const char*>(bitmap.data()),
            static_cast<std::streamsize>(bitmap.size()));
  std::vector<std::byte> block(cfg_.block_size);
  for (u64 lba = 0; lba < cfg_.num_blocks; ++lba) {
    flash_.read_block(lba, block);
    out.write(reinterpret_cast<const char*>(block.data()),
              static_cast<std::streamsize>(block.size()));
  }
  if (!out) {
    throw_error(ErrorCode::kMissingPath, "short write to " + path.string());
  }
}

void Device::load_snapshot(const std::filesystem::path& path) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(ErrorCode::kMissingPath, "cannot open " + path.string());
  }
  SnapshotHeader hdr{};
  in.read(reinterpret_cast<char*>(&hdr), sizeof(hdr));
  if (!in || std::memcmp(hdr.magic, kSnapshotMagic, 4) != 0) {
    throw_error(ErrorCode::kParseError, "not a device snapshot: " + path.string());
  }
  if (hdr.version != kSnapshotVersion) {
    throw_error(ErrorCode::kParseError,
                "unsupported snapshot version " + std::to_string(hdr.version));
  }
  if (hdr.block_size == 0 || hdr.num_blocks == 0) {
    throw_error(ErrorCode::kParseError, "snapshot header has empty geometry");
  }
  // The snapshot defines the namespace geometry.
  cfg_.block_size = static_cast<u32>(hdr.block_size);
  cfg_.num_blocks = hdr.num_blocks;
  std::vector<u8> bitmap((cfg_.num_blocks + 7) / 8, 0);
  in.read(reinterpret_cast<char*>(bitmap.data()), static_cast<std::streamsize>(bitmap.size()));
  if (!in) {
    throw_error(ErrorCode::kParseError, "snapshot truncated in liveness bitmap");
  }
  FlashNamespace fresh(cfg_.block_size, cfg_.num_blocks);
  std::vector<std::byte> block(cfg_.block_size);
  for (u64 lba = 0; lba < cfg_.num_blocks; ++lba) {
    in.read(reinterpret_cast<char*>(block.data()), static_cast<std::streamsize>(block.size()));
    if (!in) {
      throw_error(ErrorCode::kParseError, "snapshot truncated at lba " + std::to_string(lba));
    }
    bool live = (bitmap[lba / 8] >> (lba % 8)) & 1u;
    if (live) fresh.load_block(lba, std::vector<std::byte>(block.begin(), block.end()));
  }
  flash_ = std::move(fresh);
}

u64 DeviceContext::now_ns() const { return dev_.clock_ns_; }

u32 DeviceContext::block_size() const { return dev_.cfg_.block_size; }

std::vector<std::byte> DeviceContext::peek_block(u64 lba) const {
  return dev_.flash_.peek_block(lba);
}

bool DeviceContext::lba_live(u64 lba) const { return dev_.flash_.is_live(lba); }

u64 DeviceContext::lba_epoch(u64 lba) const { return dev_.flash_.epoch_of(lba); }

u64 DeviceContext::lba_written_at(u64 lba) const { return dev_.flash_.written_at(lba); }

u64 DeviceContext::bill_intra_transfer(u64 bytes) {
  return dev_.intra_transfer_locked(bytes);
}

void DeviceContext::add_delay(u64 ns) { dev_.pending_delay_ns_ += ns; }

}  // namespace csd::device
