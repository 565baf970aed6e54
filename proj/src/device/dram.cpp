// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/device/dram.hpp"

namespace csd::device {

std::optional<u64> DramAllocator::allocate(u64 length) {
  if (length == 0) return std::nullopt;
  for (auto it = free_by_addr_.begin(); it != free_by_addr_.end(); ++it) {
    if (it->second >= length) {
      u64 offset = it->first;
      u64 remaining = it->second - length;
      free_by_addr_.erase(it);
      if (remaining > 0) free_by_addr_[offset + length] = remaining;
      used_ += length;
      return offset;
    }
  }
  return std::nullopt;
}

void DramAllocator::release(u64 offset, u64 length) {
  if (length == 0) return;
  used_ -= length;
  auto [it, inserted] = free_by_addr_.emplace(offset, length);
  (void)inserted;
  // Coalesce with successor, then predecessor.
  auto next = std::next(it);
  if (next != free_by_addr_.end() && it->first + it->second == next->first) {
    it->second += next->second;
    free_by_addr_.erase(next);
  }
  if (it != free_by_addr_.begin()) {
    auto prev = std::prev(it);
    if (prev->first + prev->second == it->first) {
      prev->second += it->second;
      free_by_addr_.erase(it);
    }
  }
}

}  // namespace csd::device
