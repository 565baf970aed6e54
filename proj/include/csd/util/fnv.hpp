// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

#include "csd/types.hpp"

namespace csd::util {

// FNV-1a 64-bit. Content digests for corruption scans; not cryptographic.
inline u64 fnv1a64(std::span<const std::byte> data) {
  u64 hash = 0xCBF29CE484222325ULL;
  for (std::byte b : data) {
    hash ^= static_cast<u64>(b);
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

inline u64 fnv1a64_str(const std::string& s) {
  u64 hash = 0xCBF29CE484222325ULL;
  for (char c : s) {
    hash ^= static_cast<u8>(c);
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

}  // namespace csd::util
