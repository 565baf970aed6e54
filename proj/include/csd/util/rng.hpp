// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "csd/types.hpp"

namespace csd::util {

// splitmix64: tiny deterministic generator with identical output on every
// platform. All reproducibility guarantees in the simulator (jitter, fault
// probability draws, synthetic payloads) rest on this stream, so stdlib
// distributions are avoided on purpose.
class Rng {
 public:
  explicit Rng(u64 seed) : state_(seed) {}

  u64 next_u64() {
    u64 z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound). bound must be nonzero.
  u64 next_below(u64 bound) { return next_u64() % bound; }

  u32 next_u32() { return static_cast<u32>(next_u64() >> 32); }

  u8 next_byte() { return static_cast<u8>(next_u64() >> 56); }

 private:
  u64 state_;
};

// Derives an independent stream from (seed, salt) pairs; used to give each
// fault rule and each benchmark matrix its own generator.
inline u64 derive_seed(u64 seed, u64 salt) {
  Rng rng(seed ^ (salt * 0xD6E8FEB86659FD93ULL + 0xA5A5A5A5A5A5A5A5ULL));
  return rng.next_u64();
}

}  // namespace csd::util
