// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/device/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "csd/error.hpp"

namespace csd::device {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& origin, int line, const std::string& what) {
  throw_error(ErrorCode::kParseError,
              origin + ":" + std::to_string(line) + ": " + what);
}

u64 parse_u64(const std::string& tok, const std::string& origin, int line) {
  size_t pos = 0;
  u64 v = 0;
  try {
    v = std::stoull(tok, &pos, 10);
  } catch (const std::exception&) {
    bad_value(origin, line, "expected unsigned integer, got '" + tok + "'");
  }
  if (pos != tok.size()) {
    bad_value(origin, line, "trailing characters after integer '" + tok + "'");
  }
  return v;
}

double parse_f64(const std::string& tok, const std::string& origin, int line) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    bad_value(origin, line, "expected number, got '" + tok + "'");
  }
  if (pos != tok.size()) {
    bad_value(origin, line, "trailing characters after number '" + tok + "'");
  }
  return v;
}

std::vector<KernelAnchor> parse_anchors(const std::string& tok, const std::string& origin,
                                        int line) {
  std::vector<KernelAnchor> anchors;
  std::stringstream ss(tok);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    pair = trim(pair);
    size_t colon = pair.find(':');
    if (colon == std::string::npos) {
      bad_value(origin, line, "anchor '" + pair + "' is not dim:seconds");
    }
    KernelAnchor a;
    a.dim = static_cast<u32>(parse_u64(trim(pair.substr(0, colon)), origin, line));
    a.seconds = parse_f64(trim(pair.substr(colon + 1)), origin, line);
    anchors.push_back(a);
  }
  if (anchors.empty()) bad_value(origin, line, "empty anchor list");
  return anchors;
}

std::string format_anchors(const std::vector<KernelAnchor>& anchors) {
  std::string out;
  char buf[64];
  for (size_t i = 0; i < anchors.size(); ++i) {
    if (i) out += ",";
    std::snprintf(buf, sizeof(buf), "%u:%.9g", anchors[i].dim, anchors[i].seconds);
    out += buf;
  }
  return out;
}

}  // namespace

DeviceConfig parse_device_config(std::istream& in, const std::string& origin) {
  DeviceConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bad_value(origin, lineno, "expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      bad_value(origin, lineno, "empty key or value");
    }

    if (key == "block_size") {
      cfg.block_size = static_cast<u32>(parse_u64(val, origin, lineno));
    } else if (key == "num_blocks") {
      cfg.num_blocks = parse_u64(val, origin, lineno);
    } else if (key == "dram_capacity") {
      cfg.dram_capacity = parse_u64(val, origin, lineno);
    } else if (key == "p2p_bandwidth_bps") {
      cfg.timing.p2p.bandwidth_bps = parse_u64(val, origin, lineno);
    } else if (key == "p2p_overhead_ns") {
      cfg.timing.p2p.fixed_overhead_ns = parse_u64(val, origin, lineno);
    } else if (key == "host_bandwidth_bps") {
      cfg.timing.host.bandwidth_bps = parse_u64(val, origin, lineno);
    } else if (key == "host_overhead_ns") {
      cfg.timing.host.fixed_overhead_ns = parse_u64(val, origin, lineno);
    } else if (key == "host_copy_penalty_bps") {
      cfg.timing.host.host_copy_penalty_bps = parse_u64(val, origin, lineno);
    } else if (key == "sw_anchors") {
      cfg.timing.sw_anchors = parse_anchors(val, origin, lineno);
    } else if (key == "hw_anchors") {
      cfg.timing.hw_anchors = parse_anchors(val, origin, lineno);
    } else if (key == "unroll_reference") {
      cfg.timing.unroll_reference = parse_f64(val, origin, lineno);
    } else if (key == "unroll_exponent") {
      cfg.timing.unroll_exponent = parse_f64(val, origin, lineno);
    } else if (key == "jitter_fraction") {
      cfg.timing.jitter_fraction = parse_f64(val, origin, lineno);
    } else if (key == "jitter_seed") {
      cfg.jitter_seed = parse_u64(val, origin, lineno);
    } else if (key == "max_hw_dim") {
      cfg.timing.max_hw_dim = static_cast<u32>(parse_u64(val, origin, lineno));
    } else {
      throw_error(ErrorCode::kInvalidConfig,
                  origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (cfg.block_size == 0 || cfg.num_blocks == 0) {
    throw_error(ErrorCode::kInvalidConfig, origin + ": zero block_size or num_blocks");
  }
  cfg.timing.validate();
  return cfg;
}

DeviceConfig load_device_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_error(ErrorCode::kMissingPath, "cannot open " + path.string());
  }
  return parse_device_config(in, path.string());
}

std::string serialize_device_config(const DeviceConfig& cfg) {
  char buf[128];
  std::string out;
  auto put_u64 = [&](const char* key, u64 v) {
    std::snprintf(buf, sizeof(buf), "%s = %llu\n", key, static_cast<unsigned long long>(v));
    out += buf;
  };
  auto put_f64 = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.9g\n", key, v);
    out += buf;
  };
  put_u64("block_size", cfg.block_size);
  put_u64("num_blocks", cfg.num_blocks);
  put_u64("dram_capacity", cfg.dram_capacity);
  put_u64("p2p_bandwidth_bps", cfg.timing.p2p.bandwidth_bps);
  put_u64("p2p_overhead_ns", cfg.timing.p2p.fixed_overhead_ns);
  put_u64("host_bandwidth_bps", cfg.timing.host.bandwidth_bps);
  put_u64("host_overhead_ns", cfg.timing.host.fixed_overhead_ns);
  put_u64("host_copy_penalty_bps", cfg.timing.host.host_copy_penalty_bps);
  out += "sw_anchors = " + format_anchors(cfg.timing.sw_anchors) + "\n";
  out += "hw_anchors = " + format_anchors(cfg.timing.hw_anchors) + "\n";
  put_f64("unroll_reference", cfg.timing.unroll_reference);
  put_f64("unroll_exponent", cfg.timing.unroll_exponent);
  put_f64("jitter_fraction", cfg.timing.jitter_fraction);
  put_u64("jitter_seed", cfg.jitter_seed);
  put_u64("max_hw_dim", cfg.timing.max_hw_dim);
  return out;
}

void save_device_config(const DeviceConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw_error(ErrorCode::kMissingPath, "cannot open " + path.string() + " for writing");
  }
  out << serialize_device_config(cfg);
  if (!out) {
    throw_error(ErrorCode::kMissingPath, "short write to " + path.string());
  }
}

}  // namespace csd::device
