// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "csd/types.hpp"

namespace csd::fi {

struct LbaPredicate {
  enum class Kind { kAny, kRange, kSet };
  Kind kind = Kind::kAny;
  u64 lo = 0, hi = 0;  // inclusive, kRange
  std::set<u64> lbas;  // kSet

  bool matches(u64 lba) const {
    switch (kind) {
      case Kind::kAny: return true;
      case Kind::kRange: return lba >= lo && lba <= hi;
      case Kind::kSet: return lbas.contains(lba);
    }
    return false;
  }
};

enum class OpMask { kRead, kWrite, kBoth };

// When a matching access fires the action. Counters are per rule: nth(n)
// fires on exactly the n-th match, after(n) on every match past the n-th,
// probability(p) on a draw from the rule's own seeded generator.
struct Occurrence {
  enum class Kind { kEvery, kNth, kAfter, kProbability };
  Kind kind = Kind::kEvery;
  u64 n = 0;
  double p = 0.0;
};

struct FaultAction {
  enum class Kind { kBitFlip, kZeroBlock, kDropWrite, kShornWrite, kReadError, kDelay };
  Kind kind = Kind::kBitFlip;
  u32 byte_offset = 0;        // kBitFlip
  u32 bit = 0;                // kBitFlip
  double prefix_fraction = 0; // kShornWrite, in (0,1)
  int error_code = 0;         // kReadError
  u64 delay_ns = 0;           // kDelay
};

struct FaultRule {
  std::string rule_id;
  LbaPredicate lba;
  OpMask op = OpMask::kBoth;
  Occurrence occurrence;
  FaultAction action;
  bool enabled = true;
};

struct FaultPlan {
  u64 seed = 0;
  std::vector<FaultRule> rules;
};

// InvalidRule on out-of-range fields or an action/op mismatch (a DropWrite
// can never fire on a read, so such plans are rejected up front).
void validate_rule(const FaultRule& rule, u32 block_size);
void validate_plan(const FaultPlan& plan, u32 block_size);

std::string serialize_fault_plan(const FaultPlan& plan);
FaultPlan parse_fault_plan(const std::string& json_text, const std::string& origin);
FaultPlan load_fault_plan(const std::filesystem::path& path);
void save_fault_plan(const FaultPlan& plan, const std::filesystem::path& path);

}  // namespace csd::fi
