// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/ec/codec.hpp"

#include <algorithm>
#include <set>

#include "csd/kernels/gf256.hpp"
#include "csd/kernels/matmul.hpp"

namespace csd::ec {

using kernels::MatrixGF;
namespace gf = kernels::gf;

namespace {

void check_blocks(const std::vector<Block>& blocks, u32 expect_count, u32 block_bytes,
                  const char* what) {
  if (blocks.size() != expect_count) {
    throw_error(ErrorCode::kBlockSizeMismatch,
                std::string(what) + ": expected " + std::to_string(expect_count) +
                    " blocks, got " + std::to_string(blocks.size()));
  }
  for (const Block& b : blocks) {
    if (b.size() != block_bytes) {
      throw_error(ErrorCode::kBlockSizeMismatch,
                  std::string(what) + ": block of " + std::to_string(b.size()) +
                      " bytes, expected " + std::to_string(block_bytes));
    }
  }
}

MatrixGF blocks_to_matrix(const std::vector<Block>& blocks, u32 block_bytes) {
  MatrixGF m(static_cast<u32>(blocks.size()), block_bytes);
  for (u32 i = 0; i < blocks.size(); ++i) {
    std::copy(blocks[i].begin(), blocks[i].end(), m.elements.begin() +
                                                      static_cast<size_t>(i) * block_bytes);
  }
  return m;
}

std::vector<Block> matrix_to_blocks(const MatrixGF& m) {
  std::vector<Block> out(m.rows);
  for (u32 i = 0; i < m.rows; ++i) {
    out[i].assign(m.elements.begin() + static_cast<size_t>(i) * m.cols,
                  m.elements.begin() + static_cast<size_t>(i + 1) * m.cols);
  }
  return out;
}

MatrixGF select_rows(const MatrixGF& g, const std::vector<u32>& rows) {
  MatrixGF out(static_cast<u32>(rows.size()), g.cols);
  for (u32 i = 0; i < rows.size(); ++i) {
    for (u32 j = 0; j < g.cols; ++j) out.at(i, j) = g.at(rows[i], j);
  }
  return out;
}

void check_survivors(const std::vector<std::pair<u32, Block>>& survivors, u32 total,
                     u32 block_bytes) {
  std::set<u32> seen;
  for (const auto& [idx, block] : survivors) {
    if (idx >= total) {
      throw_error(ErrorCode::kInvalidConfig,
                  "survivor index " + std::to_string(idx) + " outside stripe of " +
                      std::to_string(total));
    }
    if (!seen.insert(idx).second) {
      throw_error(ErrorCode::kInvalidConfig,
                  "duplicate survivor index " + std::to_string(idx));
    }
    if (block.size() != block_bytes) {
      throw_error(ErrorCode::kBlockSizeMismatch,
                  "survivor block of " + std::to_string(block.size()) + " bytes");
    }
  }
}

Block xor_into(Block acc, const Block& b) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] ^= b[i];
  return acc;
}

}  // namespace

void RsConfig::validate() const {
  if (k < 1 || m < 1 || k + m > 255 || block_bytes < 1) {
    throw_error(ErrorCode::kInvalidConfig,
                "rs(k=" + std::to_string(k) + ",m=" + std::to_string(m) +
                    ") violates 1<=k, 1<=m, k+m<=255, block_bytes>=1");
  }
}

void LrcConfig::validate() const {
  if (k < 1 || l < 1 || k % l != 0 || k + l + g > 255 || block_bytes < 1) {
    throw_error(ErrorCode::kInvalidConfig,
                "lrc(k=" + std::to_string(k) + ",l=" + std::to_string(l) + ",g=" +
                    std::to_string(g) + ") violates k%l==0, k+l+g<=255, block_bytes>=1");
  }
}

MatrixGF rs_generator(const RsConfig& cfg) {
  cfg.validate();
  MatrixGF g(cfg.k + cfg.m, cfg.k);
  for (u32 j = 0; j < cfg.k; ++j) g.at(j, j) = 1;
  for (u32 i = 0; i < cfg.m; ++i) {
    for (u32 j = 0; j < cfg.k; ++j) {
      g.at(cfg.k + i, j) = gf::inv(static_cast<u8>(i ^ (cfg.m + j)));
    }
  }
  return g;
}

MatrixGF lrc_generator(const LrcConfig& cfg) {
  cfg.validate();
  const u32 r = cfg.group_size();
  MatrixGF g(cfg.total(), cfg.k);
  for (u32 j = 0; j < cfg.k; ++j) g.at(j, j) = 1;
  for (u32 t = 0; t < cfg.l; ++t) {
    for (u32 j = t * r; j < (t + 1) * r; ++j) g.at(cfg.k + t, j) = 1;
  }
  for (u32 i = 0; i < cfg.g; ++i) {
    for (u32 j = 0; j < cfg.k; ++j) {
      g.at(cfg.k + cfg.l + i, j) = gf::inv(static_cast<u8>(i ^ (cfg.g + j)));
    }
  }
  return g;
}

MatrixGF gf_invert(const MatrixGF& m) {
  if (m.rows != m.cols) {
    throw_error(ErrorCode::kDimensionMismatch, "inverse of a non-square matrix");
  }
  const u32 n = m.rows;
  MatrixGF a = m;
  MatrixGF inv = MatrixGF::identity(n);
  for (u32 col = 0; col < n; ++col) {
    u32 pivot = col;
    while (pivot < n && a.at(pivot, col) == 0) ++pivot;
    if (pivot == n) {
      throw_error(ErrorCode::kSingularSubmatrix,
                  "no pivot in column " + std::to_string(col));
    }
    if (pivot != col) {
      for (u32 j = 0; j < n; ++j) {
        std::swap(a.at(pivot, j), a.at(col, j));
        std::swap(inv.at(pivot, j), inv.at(col, j));
      }
    }
    const u8 scale = gf::inv(a.at(col, col));
    for (u32 j = 0; j < n; ++j) {
      a.at(col, j) = gf::mul(a.at(col, j), scale);
      inv.at(col, j) = gf::mul(inv.at(col, j), scale);
    }
    for (u32 row = 0; row < n; ++row) {
      if (row == col) continue;
      const u8 factor = a.at(row, col);
      if (factor == 0) continue;
      for (u32 j = 0; j < n; ++j) {
        a.at(row, j) ^= gf::mul(factor, a.at(col, j));
        inv.at(row, j) ^= gf::mul(factor, inv.at(col, j));
      }
    }
  }
  return inv;
}

std::vector<Block> rs_encode(const RsConfig& cfg, const std::vector<Block>& data) {
  cfg.validate();
  check_blocks(data, cfg.k, cfg.block_bytes, "rs_encode");
  MatrixGF g = rs_generator(cfg);
  std::vector<u32> parity_rows(cfg.m);
  for (u32 i = 0; i < cfg.m; ++i) parity_rows[i] = cfg.k + i;
  MatrixGF parity = kernels::gf_matmul(select_rows(g, parity_rows),
                                       blocks_to_matrix(data, cfg.block_bytes));
  return matrix_to_blocks(parity);
}

std::vector<Block> rs_decode(const RsConfig& cfg,
                             const std::vector<std::pair<u32, Block>>& survivors) {
  cfg.validate();
  check_survivors(survivors, cfg.total(), cfg.block_bytes);
  if (survivors.size() < cfg.k) {
    throw_error(ErrorCode::kTooFewSurvivors,
                std::to_string(survivors.size()) + " survivors, need " +
                    std::to_string(cfg.k));
  }
  std::vector<std::pair<u32, const Block*>> ordered;
  ordered.reserve(survivors.size());
  for (const auto& [idx, block] : survivors) ordered.emplace_back(idx, &block);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  ordered.resize(cfg.k);

  bool plain_data = true;
  for (u32 i = 0; i < cfg.k; ++i) plain_data = plain_data && ordered[i].first == i;
  if (plain_data) {
    std::vector<Block> out(cfg.k);
    for (u32 i = 0; i < cfg.k; ++i) out[i] = *ordered[i].second;
    return out;
  }

  std::vector<u32> rows;
  std::vector<Block> picked;
  for (const auto& [idx, block] : ordered) {
    rows.push_back(idx);
    picked.push_back(*block);
  }
  MatrixGF m_inv = gf_invert(select_rows(rs_generator(cfg), rows));
  MatrixGF data = kernels::gf_matmul(m_inv, blocks_to_matrix(picked, cfg.block_bytes));
  return matrix_to_blocks(data);
}

std::pair<Block, RepairReport> rs_repair(const RsConfig& cfg, u32 lost_index,
                                         const ReadFn& read_fn) {
  cfg.validate();
  if (lost_index >= cfg.total()) {
    throw_error(ErrorCode::kInvalidConfig,
                "lost index " + std::to_string(lost_index) + " outside stripe");
  }
  RepairReport report{lost_index, 0, 0};
  std::vector<std::pair<u32, Block>> survivors;
  for (u32 idx = 0; idx < cfg.total() && survivors.size() < cfg.k; ++idx) {
    if (idx == lost_index) continue;
    std::optional<Block> block = read_fn(idx);
    if (!block) continue;
    ++report.blocks_read;
    report.bytes_read += block->size();
    survivors.emplace_back(idx, std::move(*block));
  }
  if (survivors.size() < cfg.k) {
    throw_error(ErrorCode::kTooFewSurvivors,
                "only " + std::to_string(survivors.size()) + " readable survivors");
  }
  std::vector<Block> data = rs_decode(cfg, survivors);
  if (lost_index < cfg.k) return {std::move(data[lost_index]), report};
  std::vector<Block> parity = rs_encode(cfg, data);
  return {std::move(parity[lost_index - cfg.k]), report};
}

std::vector<Block> lrc_encode(const LrcConfig& cfg, const std::vector<Block>& data) {
  cfg.validate();
  check_blocks(data, cfg.k, cfg.block_bytes, "lrc_encode");
  const u32 r = cfg.group_size();
  std::vector<Block> parities;
  parities.reserve(cfg.l + cfg.g);
  for (u32 t = 0; t < cfg.l; ++t) {
    Block local(cfg.block_bytes, 0);
    for (u32 j = t * r; j < (t + 1) * r; ++j) local = xor_into(std::move(local), data[j]);
    parities.push_back(std::move(local));
  }
  if (cfg.g > 0) {
    MatrixGF g = lrc_generator(cfg);
    std::vector<u32> global_rows(cfg.g);
    for (u32 i = 0; i < cfg.g; ++i) global_rows[i] = cfg.k + cfg.l + i;
    MatrixGF globals = kernels::gf_matmul(select_rows(g, global_rows),
                                          blocks_to_matrix(data, cfg.block_bytes));
    for (Block& b : matrix_to_blocks(globals)) parities.push_back(std::move(b));
  }
  return parities;
}

std::pair<Block, RepairReport> lrc_repair_single(const LrcConfig& cfg, u32 lost_index,
                                                 const ReadFn& read_fn) {
  cfg.validate();
  if (lost_index >= cfg.total()) {
    throw_error(ErrorCode::kInvalidConfig,
                "lost index " + std::to_string(lost_index) + " outside stripe");
  }
  const u32 r = cfg.group_size();
  RepairReport report{lost_index, 0, 0};

  auto must_read = [&](u32 idx) -> Block {
    std::optional<Block> block = read_fn(idx);
    if (!block) {
      throw_error(ErrorCode::kNotSingleErasure,
                  "block " + std::to_string(idx) +
                      " also unavailable; use the global decode");
    }
    if (block->size() != cfg.block_bytes) {
      throw_error(ErrorCode::kBlockSizeMismatch,
                  "read returned " + std::to_string(block->size()) + " bytes");
    }
    ++report.blocks_read;
    report.bytes_read += block->size();
    return std::move(*block);
  };

  if (lost_index < cfg.k + cfg.l) {
    // Data block or local parity: XOR the rest of its group.
    const u32 group = lost_index < cfg.k ? lost_index / r : lost_index - cfg.k;
    Block acc(cfg.block_bytes, 0);
    for (u32 j = group * r; j < (group + 1) * r; ++j) {
      if (j == lost_index) continue;
      acc = xor_into(std::move(acc), must_read(j));
    }
    if (lost_index < cfg.k) acc = xor_into(std::move(acc), must_read(cfg.k + group));
    return {std::move(acc), report};
  }

  // Global parity: re-encode its row from the data blocks.
  std::vector<Block> data;
  data.reserve(cfg.k);
  for (u32 j = 0; j < cfg.k; ++j) data.push_back(must_read(j));
  std::vector<Block> parities = lrc_encode(cfg, data);
  return {std::move(parities[lost_index - cfg.k]), report};
}

std::vector<Block> lrc_decode_global(const LrcConfig& cfg,
                                     const std::vector<std::pair<u32, Block>>& survivors) {
  cfg.validate();
  check_survivors(survivors, cfg.total(), cfg.block_bytes);

  std::vector<std::pair<u32, const Block*>> ordered;
  for (const auto& [idx, block] : survivors) ordered.emplace_back(idx, &block);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  MatrixGF g = lrc_generator(cfg);

  // Greedy pivot selection: eliminate survivor rows column by column; the
  // rows that supply pivots form an invertible k x k system.
  MatrixGF work(static_cast<u32>(ordered.size()), cfg.k);
  for (u32 i = 0; i < ordered.size(); ++i) {
    for (u32 j = 0; j < cfg.k; ++j) work.at(i, j) = g.at(ordered[i].first, j);
  }
  std::vector<u32> row_origin(ordered.size());
  for (u32 i = 0; i < ordered.size(); ++i) row_origin[i] = i;

  u32 rank = 0;
  std::vector<u32> pivot_rows;  // positions into `ordered`
  for (u32 col = 0; col < cfg.k && rank < work.rows; ++col) {
    u32 pivot = rank;
    while (pivot < work.rows && work.at(pivot, col) == 0) ++pivot;
    if (pivot == work.rows) continue;
    if (pivot != rank) {
      for (u32 j = 0; j < cfg.k; ++j) std::swap(work.at(pivot, j), work.at(rank, j));
      std::swap(row_origin[pivot], row_origin[rank]);
    }
    pivot_rows.push_back(row_origin[rank]);
    const u8 scale = gf::inv(work.at(rank, col));
    for (u32 j = 0; j < cfg.k; ++j) work.at(rank, j) = gf::mul(work.at(rank, j), scale);
    for (u32 row = rank + 1; row < work.rows; ++row) {
      const u8 factor = work.at(row, col);
      if (factor == 0) continue;
      for (u32 j = 0; j < cfg.k; ++j) {
        work.at(row, j) ^= gf::mul(factor, work.at(rank, j));
      }
    }
    ++rank;
  }
  if (rank < cfg.k) {
    throw_error(ErrorCode::kUnrecoverablePattern,
                "surviving rows span rank " + std::to_string(rank) + " of " +
                    std::to_string(cfg.k));
  }

  std::sort(pivot_rows.begin(), pivot_rows.end());
  std::vector<u32> rows;
  std::vector<Block> picked;
  for (u32 pos : pivot_rows) {
    rows.push_back(ordered[pos].first);
    picked.push_back(*ordered[pos].second);
  }
  bool plain_data = true;
  for (u32 i = 0; i < cfg.k; ++i) plain_data = plain_data && rows[i] == i;
  if (plain_data) return picked;

  MatrixGF m_inv = gf_invert(select_rows(g, rows));
  MatrixGF data = kernels::gf_matmul(m_inv, blocks_to_matrix(picked, cfg.block_bytes));
  return matrix_to_blocks(data);
}

}  // namespace csd::ec
