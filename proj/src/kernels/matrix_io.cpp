// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/kernels/matrix_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian and rely on the host layout");

namespace csd::kernels {

namespace {

struct Header {
  char magic[4];
  u32 kind;
  u64 rows;
  u64 cols;
};
static_assert(sizeof(Header) == 24);

void write_file(const std::filesystem::path& path, u32 kind, u64 rows, u64 cols,
                const void* data, size_t bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw_error(ErrorCode::kParseError, "cannot open for writing: " + path.string());
  }
  Header h{};
  std::memcpy(h.magic, kMatrixMagic, 4);
  h.kind = kind;
  h.rows = rows;
  h.cols = cols;
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) {
    throw_error(ErrorCode::kParseError, "short write: " + path.string());
  }
}

Header read_header(std::ifstream& in, const std::filesystem::path& path, u32 want_kind) {
  Header h{};
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!in || std::memcmp(h.magic, kMatrixMagic, 4) != 0) {
    throw_error(ErrorCode::kParseError, "not a matrix file: " + path.string());
  }
  if (h.kind != want_kind) {
    throw_error(ErrorCode::kParseError, "unexpected element kind in " + path.string());
  }
  return h;
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const MatrixU32& m) {
  write_file(path, kElementKindU32, m.n, m.n, m.elements.data(), m.byte_size());
}

void write_matrix(const std::filesystem::path& path, const MatrixGF& m) {
  write_file(path, kElementKindGf8, m.rows, m.cols, m.elements.data(),
             m.elements.size());
}

MatrixU32 read_matrix_u32(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kParseError, "cannot open: " + path.string());
  Header h = read_header(in, path, kElementKindU32);
  if (h.rows != h.cols || h.rows > 1u << 20) {
    throw_error(ErrorCode::kParseError, "u32 matrix must be square: " + path.string());
  }
  MatrixU32 m(static_cast<u32>(h.rows));
  in.read(reinterpret_cast<char*>(m.elements.data()),
          static_cast<std::streamsize>(m.byte_size()));
  if (!in) throw_error(ErrorCode::kParseError, "truncated matrix: " + path.string());
  return m;
}

MatrixGF read_matrix_gf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kParseError, "cannot open: " + path.string());
  Header h = read_header(in, path, kElementKindGf8);
  if (h.rows > 1u << 20 || h.cols > 1u << 20) {
    throw_error(ErrorCode::kParseError, "matrix too large: " + path.string());
  }
  MatrixGF m(static_cast<u32>(h.rows), static_cast<u32>(h.cols));
  in.read(reinterpret_cast<char*>(m.elements.data()),
          static_cast<std::streamsize>(m.elements.size()));
  if (!in) throw_error(ErrorCode::kParseError, "truncated matrix: " + path.string());
  return m;
}

}  // namespace csd::kernels
