// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/util/base64.hpp"

#include <array>

#include "csd/error.hpp"

namespace csd::util {

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::array<int, 256> make_reverse_table() {
  std::array<int, 256> table{};
  table.fill(-1);
  for (int i = 0; i < 64; ++i) {
    table[static_cast<unsigned char>(kAlphabet[i])] = i;
  }
  return table;
}

const std::array<int, 256> kReverse = make_reverse_table();

}  // namespace

std::string base64_encode(std::span<const std::byte> data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  size_t i = 0;
  while (i + 3 <= data.size()) {
    u32 v = (static_cast<u32>(data[i]) << 16) |
            (static_cast<u32>(data[i + 1]) << 8) | static_cast<u32>(data[i + 2]);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
    i += 3;
  }
  size_t rem = data.size() - i;
  if (rem == 1) {
    u32 v = static_cast<u32>(data[i]) << 16;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rem == 2) {
    u32 v = (static_cast<u32>(data[i]) << 16) | (static_cast<u32>(data[i + 1]) << 8);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::byte> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) {
    throw_error(ErrorCode::kParseError, "base64 length not a multiple of 4");
  }
  std::vector<std::byte> out;
  out.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      char c = text[i + j];
      if (c == '=') {
        if (i + 4 != text.size() || j < 2) {
          throw_error(ErrorCode::kParseError, "base64 padding misplaced");
        }
        vals[j] = 0;
        ++pad;
      } else {
        int v = kReverse[static_cast<unsigned char>(c)];
        if (v < 0 || pad > 0) {
          throw_error(ErrorCode::kParseError, "base64 invalid character");
        }
        vals[j] = v;
      }
    }
    u32 v = (static_cast<u32>(vals[0]) << 18) | (static_cast<u32>(vals[1]) << 12) |
            (static_cast<u32>(vals[2]) << 6) | static_cast<u32>(vals[3]);
    out.push_back(static_cast<std::byte>((v >> 16) & 0xFF));
    if (pad < 2) out.push_back(static_cast<std::byte>((v >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<std::byte>(v & 0xFF));
  }
  return out;
}

}  // namespace csd::util
