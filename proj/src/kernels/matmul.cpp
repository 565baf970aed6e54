// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/kernels/matmul.hpp"

#include "csd/kernels/gf256.hpp"

namespace csd::kernels {

namespace {

void check_u32_dims(const MatrixU32& a, const MatrixU32& b) {
  if (a.n != b.n) {
    throw_error(ErrorCode::kDimensionMismatch, "square operands differ in dimension");
  }
}

void check_gf_dims(const MatrixGF& a, const MatrixGF& b) {
  if (a.cols != b.rows) {
    throw_error(ErrorCode::kDimensionMismatch, "a.cols != b.rows");
  }
}

}  // namespace

MatrixU32 matmul_u32(const MatrixU32& a, const MatrixU32& b) {
  check_u32_dims(a, b);
  const int n = static_cast<int>(a.n);
  MatrixU32 c(a.n);
  const u32* ap = a.elements.data();
  const u32* bp = b.elements.data();
  u32* cp = c.elements.data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    u32* crow = cp + static_cast<size_t>(i) * n;
    for (int k = 0; k < n; ++k) {
      const u32 av = ap[static_cast<size_t>(i) * n + k];
      const u32* brow = bp + static_cast<size_t>(k) * n;
      for (int j = 0; j < n; ++j) {
        crow[j] += av * brow[j];
      }
    }
  }
  return c;
}

MatrixGF gf_matmul(const MatrixGF& a, const MatrixGF& b) {
  check_gf_dims(a, b);
  const int rows = static_cast<int>(a.rows);
  const int inner = static_cast<int>(a.cols);
  const int cols = static_cast<int>(b.cols);
  MatrixGF c(a.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) {
    u8* crow = c.elements.data() + static_cast<size_t>(i) * cols;
    for (int k = 0; k < inner; ++k) {
      const u8 av = a.elements[static_cast<size_t>(i) * inner + k];
      if (av == 0) continue;
      const u8* brow = b.elements.data() + static_cast<size_t>(k) * cols;
      for (int j = 0; j < cols; ++j) {
        crow[j] ^= gf::mul(av, brow[j]);
      }
    }
  }
  return c;
}

namespace reference {

MatrixU32 matmul_u32(const MatrixU32& a, const MatrixU32& b) {
  check_u32_dims(a, b);
  const u32 n = a.n;
  MatrixU32 c(n);
  for (u32 i = 0; i < n; ++i) {
    for (u32 k = 0; k < n; ++k) {
      const u32 av = a.at(i, k);
      for (u32 j = 0; j < n; ++j) {
        c.at(i, j) += av * b.at(k, j);
      }
    }
  }
  return c;
}

MatrixGF gf_matmul(const MatrixGF& a, const MatrixGF& b) {
  check_gf_dims(a, b);
  MatrixGF c(a.rows, b.cols);
  for (u32 i = 0; i < a.rows; ++i) {
    for (u32 k = 0; k < a.cols; ++k) {
      const u8 av = a.at(i, k);
      if (av == 0) continue;
      for (u32 j = 0; j < b.cols; ++j) {
        c.at(i, j) ^= gf::mul(av, b.at(k, j));
      }
    }
  }
  return c;
}

}  // namespace reference

}  // namespace csd::kernels
