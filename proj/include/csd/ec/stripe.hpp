// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "csd/api/session.hpp"
#include "csd/ec/codec.hpp"

namespace csd::ec {

// Placement of one encoded stripe on the flash namespace: each stripe block
// occupies a contiguous LBA extent of block_bytes/device_block_size LBAs,
// recorded explicitly so layouts other than sequential stay expressible.
struct StripeManifest {
  enum class Code { kRs, kLrc };

  std::string stripe_id;
  Code code = Code::kRs;
  RsConfig rs{};
  LrcConfig lrc{};
  std::vector<u64> block_lbas;  // stripe index -> first LBA of its extent

  u32 total_blocks() const { return code == Code::kRs ? rs.total() : lrc.total(); }
  u32 stripe_block_bytes() const {
    return code == Code::kRs ? rs.block_bytes : lrc.block_bytes;
  }
  u32 lbas_per_block(u32 device_block_size) const;
  void validate() const;

  // Sequential layout starting at start_lba.
  static StripeManifest contiguous_rs(std::string stripe_id, const RsConfig& cfg,
                                      u64 start_lba, u32 device_block_size);
  static StripeManifest contiguous_lrc(std::string stripe_id, const LrcConfig& cfg,
                                       u64 start_lba, u32 device_block_size);
};

std::string serialize_manifest(const StripeManifest& manifest);
StripeManifest parse_manifest(const std::string& json_text, const std::string& origin);
StripeManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const StripeManifest& manifest, const std::filesystem::path& path);

// Writes a stripe with the encode running on the device: data blocks land
// over the host path, move to device DRAM peer-to-peer, the gf_matmul kernel
// produces every parity row in one launch, and parities store back
// peer-to-peer without touching host memory.
void write_stripe(api::Session& session, const StripeManifest& manifest,
                  const std::vector<Block>& data);

// ReadFn over host reads of a placed stripe. Indices in `unavailable` return
// nullopt without touching the device, simulating erased blocks; everything
// else is fetched and counted.
class StripeReader {
 public:
  StripeReader(api::Session& session, const StripeManifest& manifest,
               std::set<u32> unavailable = {});

  ReadFn fn();

  u64 blocks_read() const { return blocks_read_; }
  u64 bytes_read() const { return bytes_read_; }

 private:
  api::Session& session_;
  StripeManifest manifest_;
  std::set<u32> unavailable_;
  u64 blocks_read_ = 0;
  u64 bytes_read_ = 0;
};

}  // namespace csd::ec
