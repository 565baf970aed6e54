// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/kernels/registry.hpp"

#include <cmath>

#include "csd/kernels/matmul.hpp"

namespace csd::kernels {
namespace {

u32 square_dim_from_bytes(u64 bytes) {
  u64 cells = bytes / sizeof(u32);
  auto n = static_cast<u64>(std::llround(std::sqrt(static_cast<double>(cells))));
  if (n == 0 || n * n * sizeof(u32) != bytes) {
    throw_error(ErrorCode::kBufferShapeMismatch,
                std::to_string(bytes) + " bytes is not a square u32 matrix");
  }
  return static_cast<u32>(n);
}

api::Kernel make_matmul_u32() {
  api::Kernel k;
  // Without dims the buffers must be exactly square; with an explicit {n}
  // they may be larger (block-padded staging), and the matrices live in the
  // leading n*n*4 bytes.
  k.shape = [](const std::vector<u64>& input_sizes, u64 output_size,
               const std::vector<u32>& dims) -> u32 {
    if (input_sizes.size() != 2) {
      throw_error(ErrorCode::kBufferShapeMismatch, "matmul_u32 takes two inputs");
    }
    if (dims.empty()) {
      u32 n = square_dim_from_bytes(input_sizes[0]);
      u64 want = static_cast<u64>(n) * n * sizeof(u32);
      if (input_sizes[1] != want || output_size != want) {
        throw_error(ErrorCode::kBufferShapeMismatch,
                    "matmul_u32 buffers must all be " + std::to_string(want) + " bytes");
      }
      return n;
    }
    if (dims.size() != 1 || dims[0] == 0) {
      throw_error(ErrorCode::kBufferShapeMismatch, "matmul_u32 dims must be {n}");
    }
    u64 want = static_cast<u64>(dims[0]) * dims[0] * sizeof(u32);
    if (input_sizes[0] < want || input_sizes[1] < want || output_size < want) {
      throw_error(ErrorCode::kBufferShapeMismatch,
                  "matmul_u32 buffers must hold " + std::to_string(want) + " bytes");
    }
    return dims[0];
  };
  k.run = [](const std::vector<std::span<const std::byte>>& inputs,
             std::span<std::byte> output, const std::vector<u32>& dims) {
    u32 n = dims.empty() ? square_dim_from_bytes(inputs[0].size()) : dims[0];
    u64 want = static_cast<u64>(n) * n * sizeof(u32);
    MatrixU32 a = u32_from_bytes(inputs[0].subspan(0, want), n);
    MatrixU32 b = u32_from_bytes(inputs[1].subspan(0, want), n);
    MatrixU32 c = matmul_u32(a, b);
    auto bytes = to_bytes(c);
    std::copy(bytes.begin(), bytes.end(), output.begin());
  };
  return k;
}

api::Kernel make_gf_matmul() {
  api::Kernel k;
  k.shape = [](const std::vector<u64>& input_sizes, u64 output_size,
               const std::vector<u32>& dims) -> u32 {
    if (input_sizes.size() != 2 || dims.size() != 3) {
      throw_error(ErrorCode::kBufferShapeMismatch,
                  "gf_matmul takes two inputs and dims {a_rows, a_cols, b_cols}");
    }
    u64 ar = dims[0], ac = dims[1], bc = dims[2];
    if (ar == 0 || ac == 0 || bc == 0) {
      throw_error(ErrorCode::kBufferShapeMismatch, "zero dimension");
    }
    if (input_sizes[0] < ar * ac || input_sizes[1] < ac * bc || output_size < ar * bc) {
      throw_error(ErrorCode::kBufferShapeMismatch, "buffer smaller than its matrix");
    }
    // Billed as the cube-equivalent square dimension: the model is calibrated
    // on n^3-work square products.
    auto n = static_cast<u32>(std::ceil(std::cbrt(static_cast<double>(ar * ac * bc))));
    return std::max<u32>(n, 1);
  };
  k.run = [](const std::vector<std::span<const std::byte>>& inputs,
             std::span<std::byte> output, const std::vector<u32>& dims) {
    u64 ar = dims[0], ac = dims[1], bc = dims[2];
    MatrixGF a = gf_from_bytes(inputs[0].subspan(0, ar * ac), static_cast<u32>(ar),
                               static_cast<u32>(ac));
    MatrixGF b = gf_from_bytes(inputs[1].subspan(0, ac * bc), static_cast<u32>(ac),
                               static_cast<u32>(bc));
    MatrixGF c = gf_matmul(a, b);
    auto bytes = to_bytes(c);
    std::copy(bytes.begin(), bytes.end(), output.begin());
  };
  return k;
}

}  // namespace

void register_builtin_kernels(api::Session& session) {
  session.register_kernel("matmul_u32", make_matmul_u32());
  session.register_kernel("gf_matmul", make_gf_matmul());
}

}  // namespace csd::kernels
