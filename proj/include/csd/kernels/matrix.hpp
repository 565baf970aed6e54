// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstring>
#include <span>
#include <vector>

#include "csd/error.hpp"
#include "csd/types.hpp"
#include "csd/util/rng.hpp"

namespace csd::kernels {

// Square matrix of wrapping unsigned 32-bit values, row-major.
struct MatrixU32 {
  u32 n = 0;
  std::vector<u32> elements;

  MatrixU32() = default;
  explicit MatrixU32(u32 dim) : n(dim), elements(static_cast<size_t>(dim) * dim, 0) {}

  u32& at(u32 i, u32 j) { return elements[static_cast<size_t>(i) * n + j]; }
  u32 at(u32 i, u32 j) const { return elements[static_cast<size_t>(i) * n + j]; }

  static MatrixU32 identity(u32 dim) {
    MatrixU32 m(dim);
    for (u32 i = 0; i < dim; ++i) m.at(i, i) = 1;
    return m;
  }

  static MatrixU32 random(u32 dim, u64 seed) {
    MatrixU32 m(dim);
    util::Rng rng(seed);
    for (auto& e : m.elements) e = rng.next_u32();
    return m;
  }

  size_t byte_size() const { return elements.size() * sizeof(u32); }

  bool operator==(const MatrixU32&) const = default;
};

// Rectangular matrix over GF(2^8), row-major.
struct MatrixGF {
  u32 rows = 0;
  u32 cols = 0;
  std::vector<u8> elements;

  MatrixGF() = default;
  MatrixGF(u32 r, u32 c) : rows(r), cols(c), elements(static_cast<size_t>(r) * c, 0) {}

  u8& at(u32 i, u32 j) { return elements[static_cast<size_t>(i) * cols + j]; }
  u8 at(u32 i, u32 j) const { return elements[static_cast<size_t>(i) * cols + j]; }

  static MatrixGF identity(u32 dim) {
    MatrixGF m(dim, dim);
    for (u32 i = 0; i < dim; ++i) m.at(i, i) = 1;
    return m;
  }

  static MatrixGF random(u32 r, u32 c, u64 seed) {
    MatrixGF m(r, c);
    util::Rng rng(seed);
    for (auto& e : m.elements) e = rng.next_byte();
    return m;
  }

  bool operator==(const MatrixGF&) const = default;
};

// Little-endian (de)serialization used by buffers and the matrix file format.
inline std::vector<std::byte> to_bytes(const MatrixU32& m) {
  std::vector<std::byte> out(m.byte_size());
  std::memcpy(out.data(), m.elements.data(), out.size());
  return out;
}

inline MatrixU32 u32_from_bytes(std::span<const std::byte> bytes, u32 n) {
  if (bytes.size() != static_cast<size_t>(n) * n * sizeof(u32)) {
    throw_error(ErrorCode::kDimensionMismatch, "byte length does not match dimension");
  }
  MatrixU32 m(n);
  std::memcpy(m.elements.data(), bytes.data(), bytes.size());
  return m;
}

inline std::vector<std::byte> to_bytes(const MatrixGF& m) {
  std::vector<std::byte> out(m.elements.size());
  std::memcpy(out.data(), m.elements.data(), out.size());
  return out;
}

inline MatrixGF gf_from_bytes(std::span<const std::byte> bytes, u32 rows, u32 cols) {
  if (bytes.size() != static_cast<size_t>(rows) * cols) {
    throw_error(ErrorCode::kDimensionMismatch, "byte length does not match shape");
  }
  MatrixGF m(rows, cols);
  std::memcpy(m.elements.data(), bytes.data(), bytes.size());
  return m;
}

}  // namespace csd::kernels
