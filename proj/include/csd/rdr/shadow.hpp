// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <vector>

#include "csd/error.hpp"
#include "csd/types.hpp"

namespace csd::rdr {

// Budgeted pre-image store inside device DRAM. Entries are keyed by the
// overwritten content's epoch (device-global and unique, so one map
// suffices); eviction is oldest-epoch-first. Entries never mutate.
class ShadowStore {
 public:
  struct Entry {
    u64 lba = 0;
    u64 epoch = 0;               // epoch of the retained (pre-image) content
    u64 content_written_at = 0;  // when that content was committed
    u64 retained_at = 0;         // when the copy was taken
    std::vector<std::byte> payload;
  };

  explicit ShadowStore(u64 budget_bytes) : budget_(budget_bytes) {}

  u64 budget() const { return budget_; }
  u64 used_bytes() const { return used_; }
  size_t entry_count() const { return by_epoch_.size(); }

  bool contains(u64 lba, u64 epoch) const;

  // Inserts, evicting oldest epochs until the entry fits. Throws
  // ShadowBudgetExceeded when the single payload is larger than the whole
  // budget. Duplicate (lba, epoch) inserts are ignored.
  void insert(Entry entry);

  // Newest retained pre-image of lba whose content was live at time t.
  const Entry* newest_at_or_before(u64 lba, u64 t) const;

  void for_each(const std::function<void(const Entry&)>& fn) const;

 private:
  u64 budget_;
  u64 used_ = 0;
  std::map<u64, Entry> by_epoch_;
  std::map<u64, std::map<u64, const Entry*>> by_lba_;  // lba -> epoch -> entry
};

}  // namespace csd::rdr
