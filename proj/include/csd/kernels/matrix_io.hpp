// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "csd/kernels/matrix.hpp"

namespace csd::kernels {

// Binary matrix file: magic "CSDM", then little-endian u32 element kind
// (1 = u32, 2 = gf8), u64 rows, u64 cols, then row-major elements.
inline constexpr char kMatrixMagic[4] = {'C', 'S', 'D', 'M'};
inline constexpr u32 kElementKindU32 = 1;
inline constexpr u32 kElementKindGf8 = 2;

void write_matrix(const std::filesystem::path& path, const MatrixU32& m);
void write_matrix(const std::filesystem::path& path, const MatrixGF& m);

MatrixU32 read_matrix_u32(const std::filesystem::path& path);
MatrixGF read_matrix_gf(const std::filesystem::path& path);

}  // namespace csd::kernels
