// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "csd/error.hpp"
#include "csd/types.hpp"

namespace csd::kernels::gf {

// GF(2^8) with reduction polynomial x^8+x^4+x^3+x^2+1 (0x11D), generator 2.
inline constexpr u16 kPoly = 0x11D;

namespace detail {

struct Tables {
  std::array<u8, 256> log{};
  // exp doubled so log[a]+log[b] (max 508) indexes without a reduction.
  std::array<u8, 512> exp{};
};

constexpr Tables make_tables() {
  Tables t{};
  u16 x = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<u8>(x);
    t.log[x] = static_cast<u8>(i);
    x <<= 1;
    if (x & 0x100) x ^= kPoly;
  }
  for (int i = 255; i < 512; ++i) {
    t.exp[i] = t.exp[i - 255];
  }
  t.log[0] = 0;  // never consulted; mul/inv guard zero first
  return t;
}

inline constexpr Tables kTables = make_tables();

}  // namespace detail

inline u8 mul(u8 a, u8 b) {
  if (a == 0 || b == 0) return 0;
  return detail::kTables.exp[detail::kTables.log[a] + detail::kTables.log[b]];
}

inline u8 inv(u8 a) {
  if (a == 0) throw_error(ErrorCode::kZeroInverse, "0 has no inverse in GF(256)");
  return detail::kTables.exp[255 - detail::kTables.log[a]];
}

inline u8 add(u8 a, u8 b) { return a ^ b; }

inline u8 div(u8 a, u8 b) { return mul(a, inv(b)); }

}  // namespace csd::kernels::gf
