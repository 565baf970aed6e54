// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "csd/error.hpp"
#include "csd/types.hpp"

namespace csd::device {

// Block-addressable persistent store. Blocks never written read back as
// zeroes, matching a freshly formatted namespace.
class FlashNamespace {
 public:
  struct Block {
    std::vector<std::byte> payload;
    u64 epoch = 0;          // device-global, unique per committed block write
    u64 written_at_ns = 0;  // sim time of the commit
  };

  FlashNamespace(u32 block_size, u64 num_blocks)
      : block_size_(block_size), num_blocks_(num_blocks) {}

  u32 block_size() const { return block_size_; }
  u64 num_blocks() const { return num_blocks_; }

  bool is_live(u64 lba) const { return store_.contains(lba); }

  void check_range(u64 lba, u64 count) const {
    if (lba >= num_blocks_ || count > num_blocks_ - lba) {
      throw_error(ErrorCode::kRangeOutOfBounds,
                  "lba " + std::to_string(lba) + "+" + std::to_string(count) +
                      " exceeds " + std::to_string(num_blocks_) + " blocks");
    }
  }

  // Copies the block (or zeroes) into out, which must be block_size long.
  void read_block(u64 lba, std::span<std::byte> out) const;

  std::vector<std::byte> peek_block(u64 lba) const;

  // Stores the payload and stamps a fresh epoch. Payload must be block_size.
  void commit_block(u64 lba, std::span<const std::byte> payload, u64 now_ns);

  u64 epoch_of(u64 lba) const;
  u64 written_at(u64 lba) const;
  u64 current_epoch() const { return epoch_counter_; }

  void for_each_live(const std::function<void(u64 lba, const Block&)>& fn) const;

  // Snapshot support: raw handle used by the image writer/loader.
  const std::unordered_map<u64, Block>& blocks() const { return store_; }
  void load_block(u64 lba, std::vector<std::byte> payload);  // stamps a fresh epoch at t=0

 private:
  u32 block_size_;
  u64 num_blocks_;
  u64 epoch_counter_ = 0;
  std::unordered_map<u64, Block> store_;
};

}  // namespace csd::device
