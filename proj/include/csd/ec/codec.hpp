// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "csd/kernels/matrix.hpp"

namespace csd::ec {

using Block = std::vector<u8>;

// Supplies stripe blocks by index; nullopt marks a block as unavailable
// (erased). Codecs count the reads they actually issue, so the I/O cost of a
// repair is an observation, not an assertion.
using ReadFn = std::function<std::optional<Block>(u32 index)>;

struct RsConfig {
  u32 k = 0;           // data blocks
  u32 m = 0;           // parity blocks
  u32 block_bytes = 0;

  u32 total() const { return k + m; }
  void validate() const;
};

struct LrcConfig {
  u32 k = 0;           // data blocks
  u32 l = 0;           // local groups, k divisible by l
  u32 g = 0;           // global parities
  u32 block_bytes = 0;

  u32 group_size() const { return k / l; }
  u32 total() const { return k + l + g; }
  void validate() const;
};

struct RepairReport {
  u32 recovered_index = 0;
  u64 blocks_read = 0;
  u64 bytes_read = 0;
};

// Systematic generators: top k x k identity, parity rows below. Global
// parity rows are Cauchy (parity row i uses x=i, data column j uses y=m+j),
// so every square submatrix of the parity block is invertible and any k
// surviving rows decode.
kernels::MatrixGF rs_generator(const RsConfig& cfg);
kernels::MatrixGF lrc_generator(const LrcConfig& cfg);

// Gauss-Jordan inverse over GF(2^8). SingularSubmatrix if rank-deficient.
kernels::MatrixGF gf_invert(const kernels::MatrixGF& m);

// --- Reed-Solomon ---
std::vector<Block> rs_encode(const RsConfig& cfg, const std::vector<Block>& data);
// survivors: (stripe index, contents) pairs, at least k distinct.
std::vector<Block> rs_decode(const RsConfig& cfg,
                             const std::vector<std::pair<u32, Block>>& survivors);
// Full-decode repair of one block: reads k survivors through read_fn.
std::pair<Block, RepairReport> rs_repair(const RsConfig& cfg, u32 lost_index,
                                         const ReadFn& read_fn);

// --- Locally repairable code ---
// Stripe order: k data, l local XOR parities, g global Cauchy parities.
std::vector<Block> lrc_encode(const LrcConfig& cfg, const std::vector<Block>& data);
// Single loss inside a local group: XOR of the group's other members.
// Reads group_size blocks. Lost global parities re-encode from the k data
// blocks instead. NotSingleErasure if a needed group member is unavailable.
std::pair<Block, RepairReport> lrc_repair_single(const LrcConfig& cfg, u32 lost_index,
                                                 const ReadFn& read_fn);
// Any-pattern decode: picks k linearly independent surviving rows;
// UnrecoverablePattern if the survivors span less than the data space.
std::vector<Block> lrc_decode_global(const LrcConfig& cfg,
                                     const std::vector<std::pair<u32, Block>>& survivors);

}  // namespace csd::ec
