// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/ec/stripe.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "csd/kernels/matmul.hpp"
#include "csd/kernels/registry.hpp"

namespace csd::ec {

using nlohmann::json;

u32 StripeManifest::lbas_per_block(u32 device_block_size) const {
  u32 bb = stripe_block_bytes();
  if (device_block_size == 0 || bb % device_block_size != 0) {
    throw_error(ErrorCode::kBlockSizeMismatch,
                "stripe block of " + std::to_string(bb) +
                    " bytes is not a whole number of " +
                    std::to_string(device_block_size) + "-byte device blocks");
  }
  return bb / device_block_size;
}

void StripeManifest::validate() const {
  if (code == Code::kRs) {
    rs.validate();
  } else {
    lrc.validate();
  }
  if (block_lbas.size() != total_blocks()) {
    throw_error(ErrorCode::kInvalidConfig,
                "manifest maps " + std::to_string(block_lbas.size()) + " blocks, code has " +
                    std::to_string(total_blocks()));
  }
}

static std::vector<u64> sequential_lbas(u32 total, u64 start_lba, u32 per_block) {
  std::vector<u64> lbas(total);
  for (u32 i = 0; i < total; ++i) lbas[i] = start_lba + static_cast<u64>(i) * per_block;
  return lbas;
}

StripeManifest StripeManifest::contiguous_rs(std::string stripe_id, const RsConfig& cfg,
                                             u64 start_lba, u32 device_block_size) {
  cfg.validate();
  StripeManifest m;
  m.stripe_id = std::move(stripe_id);
  m.code = Code::kRs;
  m.rs = cfg;
  m.block_lbas = sequential_lbas(cfg.total(), start_lba, m.lbas_per_block(device_block_size));
  return m;
}

StripeManifest StripeManifest::contiguous_lrc(std::string stripe_id, const LrcConfig& cfg,
                                              u64 start_lba, u32 device_block_size) {
  cfg.validate();
  StripeManifest m;
  m.stripe_id = std::move(stripe_id);
  m.code = Code::kLrc;
  m.lrc = cfg;
  m.block_lbas = sequential_lbas(cfg.total(), start_lba, m.lbas_per_block(device_block_size));
  return m;
}

std::string serialize_manifest(const StripeManifest& manifest) {
  manifest.validate();
  json j;
  j["stripe_id"] = manifest.stripe_id;
  if (manifest.code == StripeManifest::Code::kRs) {
    j["code"] = "rs";
    j["k"] = manifest.rs.k;
    j["m"] = manifest.rs.m;
    j["block_bytes"] = manifest.rs.block_bytes;
  } else {
    j["code"] = "lrc";
    j["k"] = manifest.lrc.k;
    j["l"] = manifest.lrc.l;
    j["g"] = manifest.lrc.g;
    j["block_bytes"] = manifest.lrc.block_bytes;
  }
  json blocks = json::array();
  for (u32 i = 0; i < manifest.block_lbas.size(); ++i) {
    blocks.push_back(json{{"index", i}, {"lba", manifest.block_lbas[i]}});
  }
  j["blocks"] = std::move(blocks);
  return j.dump(2) + "\n";
}

StripeManifest parse_manifest(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw_error(ErrorCode::kParseError, origin + ": " + e.what());
  }
  try {
    StripeManifest m;
    m.stripe_id = j.at("stripe_id").get<std::string>();
    std::string code = j.at("code").get<std::string>();
    if (code == "rs") {
      m.code = StripeManifest::Code::kRs;
      m.rs.k = j.at("k").get<u32>();
      m.rs.m = j.at("m").get<u32>();
      m.rs.block_bytes = j.at("block_bytes").get<u32>();
    } else if (code == "lrc") {
      m.code = StripeManifest::Code::kLrc;
      m.lrc.k = j.at("k").get<u32>();
      m.lrc.l = j.at("l").get<u32>();
      m.lrc.g = j.at("g").get<u32>();
      m.lrc.block_bytes = j.at("block_bytes").get<u32>();
    } else {
      throw_error(ErrorCode::kParseError, origin + ": unknown code '" + code + "'");
    }
    m.block_lbas.assign(m.total_blocks(), 0);
    std::vector<bool> seen(m.total_blocks(), false);
    for (const json& b : j.at("blocks")) {
      u32 index = b.at("index").get<u32>();
      if (index >= m.total_blocks() || seen[index]) {
        throw_error(ErrorCode::kParseError,
                    origin + ": bad or repeated block index " + std::to_string(index));
      }
      seen[index] = true;
      m.block_lbas[index] = b.at("lba").get<u64>();
    }
    for (u32 i = 0; i < seen.size(); ++i) {
      if (!seen[i]) {
        throw_error(ErrorCode::kParseError,
                    origin + ": block " + std::to_string(i) + " has no LBA");
      }
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw_error(ErrorCode::kParseError, origin + ": " + e.what());
  }
}

StripeManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_error(ErrorCode::kMissingPath, "cannot open " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.string());
}

void save_manifest(const StripeManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw_error(ErrorCode::kMissingPath, "cannot open " + path.string() + " for writing");
  }
  out << serialize_manifest(manifest);
  if (!out) {
    throw_error(ErrorCode::kMissingPath, "short write to " + path.string());
  }
}

namespace {

std::span<const std::byte> as_bytes(const Block& b) {
  return {reinterpret_cast<const std::byte*>(b.data()), b.size()};
}

// Parity rows of the generator, as a (total-k) x k coefficient matrix.
kernels::MatrixGF parity_rows(const StripeManifest& manifest) {
  kernels::MatrixGF g = manifest.code == StripeManifest::Code::kRs
                            ? rs_generator(manifest.rs)
                            : lrc_generator(manifest.lrc);
  u32 k = manifest.code == StripeManifest::Code::kRs ? manifest.rs.k : manifest.lrc.k;
  kernels::MatrixGF rows(g.rows - k, k);
  for (u32 i = 0; i < rows.rows; ++i) {
    for (u32 j = 0; j < k; ++j) rows.at(i, j) = g.at(k + i, j);
  }
  return rows;
}

}  // namespace

void write_stripe(api::Session& session, const StripeManifest& manifest,
                  const std::vector<Block>& data) {
  manifest.validate();
  const u32 bb = manifest.stripe_block_bytes();
  const u32 k = manifest.code == StripeManifest::Code::kRs ? manifest.rs.k : manifest.lrc.k;
  const u32 parities = manifest.total_blocks() - k;
  if (data.size() != k) {
    throw_error(ErrorCode::kBlockSizeMismatch,
                "stripe needs " + std::to_string(k) + " data blocks, got " +
                    std::to_string(data.size()));
  }
  const u32 ext = manifest.lbas_per_block(session.device().block_size());

  for (u32 i = 0; i < k; ++i) {
    if (data[i].size() != bb) {
      throw_error(ErrorCode::kBlockSizeMismatch,
                  "data block " + std::to_string(i) + " has " +
                      std::to_string(data[i].size()) + " bytes");
    }
    session.write_from_host(manifest.block_lbas[i], ext, as_bytes(data[i]));
  }

  kernels::register_builtin_kernels(session);
  kernels::MatrixGF coeff = parity_rows(manifest);
  auto data_buf = session.alloc_device_buffer(static_cast<u64>(k) * bb, true);
  auto coeff_buf = session.alloc_device_buffer(coeff.elements.size(), false);
  auto parity_buf = session.alloc_device_buffer(static_cast<u64>(parities) * bb, true);

  for (u32 i = 0; i < k; ++i) {
    session.load_from_flash(manifest.block_lbas[i], ext, data_buf.id,
                            device::PathKind::kPeerToPeer, static_cast<u64>(i) * bb);
  }
  session.upload_to_buffer(coeff_buf.id, kernels::to_bytes(coeff));
  session.launch_kernel("gf_matmul", KernelConfig{}, {coeff_buf.id, data_buf.id},
                        parity_buf.id, {parities, k, bb});
  for (u32 p = 0; p < parities; ++p) {
    session.store_to_flash(parity_buf.id, manifest.block_lbas[k + p], ext,
                           device::PathKind::kPeerToPeer, static_cast<u64>(p) * bb);
  }

  session.free_device_buffer(parity_buf.id);
  session.free_device_buffer(coeff_buf.id);
  session.free_device_buffer(data_buf.id);
}

StripeReader::StripeReader(api::Session& session, const StripeManifest& manifest,
                           std::set<u32> unavailable)
    : session_(session), manifest_(manifest), unavailable_(std::move(unavailable)) {
  manifest_.validate();
}

ReadFn StripeReader::fn() {
  return [this](u32 index) -> std::optional<Block> {
    if (index >= manifest_.total_blocks()) {
      throw_error(ErrorCode::kInvalidConfig,
                  "stripe block " + std::to_string(index) + " out of range");
    }
    if (unavailable_.contains(index)) return std::nullopt;
    const u32 ext = manifest_.lbas_per_block(session_.device().block_size());
    auto [bytes, ev] = session_.read_to_host(manifest_.block_lbas[index], ext);
    Block out(bytes.size());
    std::memcpy(out.data(), bytes.data(), bytes.size());
    ++blocks_read_;
    bytes_read_ += out.size();
    return out;
  };
}

}  // namespace csd::ec
