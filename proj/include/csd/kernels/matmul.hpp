// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "csd/kernels/matrix.hpp"

namespace csd::kernels {

// OpenMP-parallel kernels. Products are elementwise-deterministic (integer and
// GF arithmetic, one owner per output element), so parallel and serial paths
// are bit-identical by construction and tests hold them to that.

// c[i][j] = sum_k a[i][k]*b[k][j] mod 2^32. Throws DimensionMismatch.
MatrixU32 matmul_u32(const MatrixU32& a, const MatrixU32& b);

// Standard product with gf::mul and XOR accumulation. a.cols must equal b.rows.
MatrixGF gf_matmul(const MatrixGF& a, const MatrixGF& b);

// Single-threaded reference implementations, kept as the oracle the parallel
// kernels are tested against and as the CPU-path kernel in the benchmark.
namespace reference {

MatrixU32 matmul_u32(const MatrixU32& a, const MatrixU32& b);
MatrixGF gf_matmul(const MatrixGF& a, const MatrixGF& b);

}  // namespace reference

}  // namespace csd::kernels
