// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/rdr/shadow.hpp"

namespace csd::rdr {

bool ShadowStore::contains(u64 lba, u64 epoch) const {
  auto it = by_lba_.find(lba);
  return it != by_lba_.end() && it->second.contains(epoch);
}

void ShadowStore::insert(Entry entry) {
  if (contains(entry.lba, entry.epoch)) return;
  const u64 bytes = entry.payload.size();
  if (bytes > budget_) {
    throw_error(ErrorCode::kShadowBudgetExceeded,
                "block of " + std::to_string(bytes) + " bytes exceeds budget of " +
                    std::to_string(budget_));
  }
  while (used_ + bytes > budget_ && !by_epoch_.empty()) {
    auto oldest = by_epoch_.begin();
    used_ -= oldest->second.payload.size();
    by_lba_[oldest->second.lba].erase(oldest->first);
    if (by_lba_[oldest->second.lba].empty()) by_lba_.erase(oldest->second.lba);
    by_epoch_.erase(oldest);
  }
  used_ += bytes;
  u64 epoch = entry.epoch;
  u64 lba = entry.lba;
  auto [it, inserted] = by_epoch_.emplace(epoch, std::move(entry));
  (void)inserted;
  by_lba_[lba][epoch] = &it->second;
}

const ShadowStore::Entry* ShadowStore::newest_at_or_before(u64 lba, u64 t) const {
  auto it = by_lba_.find(lba);
  if (it == by_lba_.end()) return nullptr;
  // Epochs are assigned in time order, so scanning epochs descending visits
  // content timestamps descending too.
  for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
    if (rit->second->content_written_at <= t) return rit->second;
  }
  return nullptr;
}

void ShadowStore::for_each(const std::function<void(const Entry&)>& fn) const {
  for (const auto& [epoch, entry] : by_epoch_) {
    (void)epoch;
    fn(entry);
  }
}

}  // namespace csd::rdr
