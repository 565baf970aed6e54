// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>

#include "csd/types.hpp"

namespace csd::device {

// Tracks device-DRAM regions with a first-fit, address-ordered free list.
// Adjacent free regions coalesce on release, so alloc/free/alloc of the same
// size lands back on the same offset.
class DramAllocator {
 public:
  explicit DramAllocator(u64 capacity) : capacity_(capacity) {
    if (capacity > 0) free_by_addr_[0] = capacity;
  }

  u64 capacity() const { return capacity_; }
  u64 used() const { return used_; }

  std::optional<u64> allocate(u64 length);
  void release(u64 offset, u64 length);

 private:
  u64 capacity_;
  u64 used_ = 0;
  std::map<u64, u64> free_by_addr_;  // offset -> length
};

}  // namespace csd::device
