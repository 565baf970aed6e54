// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/device/flash.hpp"

#include <algorithm>
#include <cstring>

namespace csd::device {

void FlashNamespace::read_block(u64 lba, std::span<std::byte> out) const {
  check_range(lba, 1);
  if (out.size() != block_size_) {
    throw_error(ErrorCode::kDestinationTooSmall, "block read needs a full-block span");
  }
  auto it = store_.find(lba);
  if (it == store_.end()) {
    std::memset(out.data(), 0, out.size());
  } else {
    std::memcpy(out.data(), it->second.payload.data(), block_size_);
  }
}

std::vector<std::byte> FlashNamespace::peek_block(u64 lba) const {
  std::vector<std::byte> out(block_size_);
  read_block(lba, out);
  return out;
}

void FlashNamespace::commit_block(u64 lba, std::span<const std::byte> payload,
                                  u64 now_ns) {
  check_range(lba, 1);
  if (payload.size() != block_size_) {
    throw_error(ErrorCode::kMisalignedLength, "payload must be exactly one block");
  }
  Block& blk = store_[lba];
  blk.payload.assign(payload.begin(), payload.end());
  blk.epoch = ++epoch_counter_;
  blk.written_at_ns = now_ns;
}

u64 FlashNamespace::epoch_of(u64 lba) const {
  auto it = store_.find(lba);
  return it == store_.end() ? 0 : it->second.epoch;
}

u64 FlashNamespace::written_at(u64 lba) const {
  auto it = store_.find(lba);
  return it == store_.end() ? 0 : it->second.written_at_ns;
}

void FlashNamespace::for_each_live(
    const std::function<void(u64, const Block&)>& fn) const {
  // Visit in LBA order so callers observe a deterministic sequence.
  std::vector<u64> lbas;
  lbas.reserve(store_.size());
  for (const auto& [lba, _] : store_) lbas.push_back(lba);
  std::sort(lbas.begin(), lbas.end());
  for (u64 lba : lbas) fn(lba, store_.at(lba));
}

void FlashNamespace::load_block(u64 lba, std::vector<std::byte> payload) {
  check_range(lba, 1);
  if (payload.size() != block_size_) {
    throw_error(ErrorCode::kMisalignedLength, "payload must be exactly one block");
  }
  Block& blk = store_[lba];
  blk.payload = std::move(payload);
  blk.epoch = ++epoch_counter_;
  blk.written_at_ns = 0;
}

}  // namespace csd::device
