// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// csdguard: drives the simulated device and its data-protection services.
// Exit codes: 0 success, 1 usage, 2 domain error, 3 file/parse error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "csd/bench/bench.hpp"
#include "csd/bench/trace.hpp"
#include "csd/device/config_io.hpp"
#include "csd/device/device.hpp"
#include "csd/ec/codec.hpp"
#include "csd/error.hpp"
#include "csd/fi/engine.hpp"
#include "csd/rdr/monitor.hpp"

namespace {

using csd::Error;
using csd::ErrorCode;
using csd::u32;
using csd::u64;

// Filesystem failures exit with 3, like parse errors.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(path + ": cannot open for writing");
  return out;
}

std::vector<csd::u8> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path + ": cannot open");
  std::vector<csd::u8> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::string& path, const std::vector<csd::u8>& bytes) {
  auto out = open_out(path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure(path + ": write failed");
}

csd::device::DeviceConfig make_device_config(const std::string& config_path, u64 seed) {
  csd::device::DeviceConfig cfg;
  if (!config_path.empty()) cfg = csd::device::load_device_config(config_path);
  cfg.jitter_seed = seed;
  return cfg;
}

std::vector<u32> parse_dims(const std::string& text) {
  std::vector<u32> dims;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(field, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != field.size() || v == 0) {
      throw Error(ErrorCode::kInvalidConfig, "--dims expects positive integers, got '" + field + "'");
    }
    dims.push_back(static_cast<u32>(v));
  }
  if (dims.empty()) throw Error(ErrorCode::kInvalidConfig, "--dims is empty");
  return dims;
}

// --- bench ---

struct BenchOpts {
  std::string config;
  std::string dims = "384,1024,1536";
  std::string mode = "simulated";
  std::string out;
  u64 seed = 1;
  u32 reps_transfer = 2000;
  u32 reps_kernel = 50;
};

int run_bench_matmul(const BenchOpts& opt) {
  csd::bench::BenchPlan plan;
  plan.dims = parse_dims(opt.dims);
  plan.transfer_reps = opt.reps_transfer;
  plan.kernel_reps = opt.reps_kernel;
  plan.seed = opt.seed;
  if (opt.mode == "simulated") {
    plan.mode = csd::bench::BenchMode::kSimulated;
  } else if (opt.mode == "live-software") {
    plan.mode = csd::bench::BenchMode::kLiveSoftware;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "--mode must be simulated or live-software");
  }

  csd::device::Device dev(make_device_config(opt.config, opt.seed));
  csd::api::Session session(dev);
  csd::bench::BenchReport report = csd::bench::run_bench(session, plan);

  if (opt.out.empty()) {
    csd::bench::write_csv(std::cout, report.rows);
    csd::bench::write_summary(std::cerr, report);
  } else {
    auto out = open_out(opt.out);
    csd::bench::write_csv(out, report.rows);
    csd::bench::write_summary(std::cout, report);
  }
  for (const auto& d : report.dims) {
    if (d.hw_supported && !d.outputs_match) {
      std::cerr << "error: path outputs differ at dim " << d.dim << '\n';
      return 2;
    }
  }
  return 0;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

int run_bench_report(const std::string& csv_path) {
  auto rows = csd::bench::load_csv(csv_path);
  csd::bench::ReductionReport rep = csd::bench::report_latency_reduction(rows);
  for (const auto& lr : rep.per_dim) {
    std::cout << "dim " << lr.dim << ": latency reduction " << pct(lr.pct) << "%\n";
  }
  std::cout << "max: " << pct(rep.best_pct) << "% at dim " << rep.best_dim << '\n';
  return 0;
}

// --- ec ---

struct EcOpts {
  std::string rs;   // "k,m"
  std::string lrc;  // "k,l,g"
  std::string manifest;
  std::string shards;  // path prefix; shard i lives at <prefix>.<i>
  std::string in;
  std::string out;
  u32 block_bytes = 0;
  int lost = -1;
};

struct EcResolved {
  bool is_rs = true;
  csd::ec::RsConfig rs;
  csd::ec::LrcConfig lrc;
  u64 data_bytes = 0;  // original length, 0 when unknown
  u32 total() const { return is_rs ? rs.total() : lrc.total(); }
  u32 k() const { return is_rs ? rs.k : lrc.k; }
  u32 block_bytes() const { return is_rs ? rs.block_bytes : lrc.block_bytes; }
};

std::vector<u32> parse_u32_list(const std::string& text, size_t want, const char* flag) {
  std::vector<u32> vals;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      size_t pos = 0;
      unsigned long v = std::stoul(field, &pos);
      if (pos != field.size()) throw std::invalid_argument(field);
      vals.push_back(static_cast<u32>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(flag) + " expects " + std::to_string(want) + " integers");
    }
  }
  if (vals.size() != want) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(flag) + " expects " + std::to_string(want) + " integers");
  }
  return vals;
}

std::string shard_path(const std::string& prefix, u32 index) {
  return prefix + "." + std::to_string(index);
}

std::string manifest_path(const std::string& prefix) { return prefix + ".manifest.json"; }

void save_manifest(const EcResolved& cfg, const std::string& prefix) {
  nlohmann::json j;
  if (cfg.is_rs) {
    j = {{"code", "rs"}, {"k", cfg.rs.k}, {"m", cfg.rs.m},
         {"block_bytes", cfg.rs.block_bytes}, {"data_bytes", cfg.data_bytes}};
  } else {
    j = {{"code", "lrc"}, {"k", cfg.lrc.k}, {"l", cfg.lrc.l}, {"g", cfg.lrc.g},
         {"block_bytes", cfg.lrc.block_bytes}, {"data_bytes", cfg.data_bytes}};
  }
  auto out = open_out(manifest_path(prefix));
  out << j.dump(2) << '\n';
}

EcResolved load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path + ": cannot open");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kParseError, path + ": not a JSON object");
  }
  EcResolved cfg;
  try {
    std::string code = j.at("code").get<std::string>();
    if (code == "rs") {
      cfg.is_rs = true;
      cfg.rs.k = j.at("k").get<u32>();
      cfg.rs.m = j.at("m").get<u32>();
      cfg.rs.block_bytes = j.at("block_bytes").get<u32>();
    } else if (code == "lrc") {
      cfg.is_rs = false;
      cfg.lrc.k = j.at("k").get<u32>();
      cfg.lrc.l = j.at("l").get<u32>();
      cfg.lrc.g = j.at("g").get<u32>();
      cfg.lrc.block_bytes = j.at("block_bytes").get<u32>();
    } else {
      throw Error(ErrorCode::kParseError, path + ": unknown code '" + code + "'");
    }
    cfg.data_bytes = j.value("data_bytes", u64{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
  if (cfg.is_rs) cfg.rs.validate(); else cfg.lrc.validate();
  return cfg;
}

// Flags beat the manifest; a bare code spec picks up block_bytes from
// whichever shard file exists.
EcResolved resolve_ec_config(const EcOpts& opt, bool need_block_bytes) {
  EcResolved cfg;
  if (!opt.rs.empty() && !opt.lrc.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "give --rs or --lrc, not both");
  }
  if (!opt.rs.empty() || !opt.lrc.empty()) {
    if (!opt.rs.empty()) {
      auto v = parse_u32_list(opt.rs, 2, "--rs");
      cfg.is_rs = true;
      cfg.rs.k = v[0];
      cfg.rs.m = v[1];
      cfg.rs.block_bytes = opt.block_bytes;
    } else {
      auto v = parse_u32_list(opt.lrc, 3, "--lrc");
      cfg.is_rs = false;
      cfg.lrc.k = v[0];
      cfg.lrc.l = v[1];
      cfg.lrc.g = v[2];
      cfg.lrc.block_bytes = opt.block_bytes;
    }
    if (need_block_bytes && cfg.block_bytes() == 0) {
      for (u32 i = 0; i < cfg.total(); ++i) {
        std::ifstream probe(shard_path(opt.shards, i), std::ios::binary | std::ios::ate);
        if (probe) {
          auto size = static_cast<u32>(probe.tellg());
          if (cfg.is_rs) cfg.rs.block_bytes = size; else cfg.lrc.block_bytes = size;
          break;
        }
      }
      if (cfg.block_bytes() == 0) {
        throw Error(ErrorCode::kInvalidConfig,
                    "--block-bytes required (no shard file to infer it from)");
      }
    }
    if (cfg.is_rs) cfg.rs.validate(); else cfg.lrc.validate();
    return cfg;
  }
  if (!opt.manifest.empty()) return load_manifest(opt.manifest);
  throw Error(ErrorCode::kInvalidConfig, "need --rs, --lrc, or --manifest");
}

int run_ec_encode(const EcOpts& opt) {
  if (opt.in.empty() || opt.shards.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "ec encode needs --in and --shards");
  }
  if (opt.rs.empty() && opt.lrc.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "ec encode needs --rs or --lrc");
  }
  if (!opt.rs.empty() && !opt.lrc.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "give --rs or --lrc, not both");
  }
  auto data_bytes = read_file(opt.in);
  EcResolved cfg;
  if (!opt.rs.empty()) {
    auto v = parse_u32_list(opt.rs, 2, "--rs");
    cfg.is_rs = true;
    cfg.rs.k = v[0];
    cfg.rs.m = v[1];
  } else {
    auto v = parse_u32_list(opt.lrc, 3, "--lrc");
    cfg.is_rs = false;
    cfg.lrc.k = v[0];
    cfg.lrc.l = v[1];
    cfg.lrc.g = v[2];
  }
  u32 k = cfg.k();
  if (k == 0) throw Error(ErrorCode::kInvalidConfig, "k must be positive");
  // Default geometry: split the input evenly across the k data blocks.
  u32 bb = opt.block_bytes;
  if (bb == 0) bb = static_cast<u32>(std::max<u64>(1, (data_bytes.size() + k - 1) / k));
  if (cfg.is_rs) cfg.rs.block_bytes = bb; else cfg.lrc.block_bytes = bb;
  if (cfg.is_rs) cfg.rs.validate(); else cfg.lrc.validate();
  cfg.data_bytes = data_bytes.size();
  if (data_bytes.size() > static_cast<u64>(k) * bb) {
    throw Error(ErrorCode::kInvalidConfig, "input exceeds k * block_bytes");
  }

  std::vector<csd::ec::Block> data(k, csd::ec::Block(bb, 0));
  for (size_t i = 0; i < data_bytes.size(); ++i) data[i / bb][i % bb] = data_bytes[i];

  // Systematic stripe on disk: the data blocks verbatim, then the parities.
  std::vector<csd::ec::Block> parities = cfg.is_rs ? csd::ec::rs_encode(cfg.rs, data)
                                                   : csd::ec::lrc_encode(cfg.lrc, data);
  for (u32 i = 0; i < k; ++i) write_file(shard_path(opt.shards, i), data[i]);
  for (u32 i = 0; i < parities.size(); ++i) {
    write_file(shard_path(opt.shards, k + i), parities[i]);
  }
  save_manifest(cfg, opt.shards);
  std::cout << "wrote " << (k + parities.size()) << " shards of " << bb << " bytes ("
            << (cfg.is_rs ? "rs" : "lrc") << "), manifest " << manifest_path(opt.shards)
            << '\n';
  return 0;
}

// Missing or lost shard files read as erasures.
csd::ec::ReadFn make_shard_reader(const std::string& prefix, u32 block_bytes,
                                  int lost_index) {
  return [prefix, block_bytes, lost_index](u32 index) -> std::optional<csd::ec::Block> {
    if (lost_index >= 0 && index == static_cast<u32>(lost_index)) return std::nullopt;
    std::ifstream in(shard_path(prefix, index), std::ios::binary);
    if (!in) return std::nullopt;
    csd::ec::Block block((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (block.size() != block_bytes) {
      throw Error(ErrorCode::kBlockSizeMismatch,
                  shard_path(prefix, index) + " is " + std::to_string(block.size()) +
                      " bytes, expected " + std::to_string(block_bytes));
    }
    return block;
  };
}

int run_ec_decode(const EcOpts& opt) {
  if (opt.shards.empty() || opt.out.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "ec decode needs --shards and --out");
  }
  EcOpts local = opt;
  if (local.rs.empty() && local.lrc.empty() && local.manifest.empty()) {
    local.manifest = manifest_path(opt.shards);
  }
  EcResolved cfg = resolve_ec_config(local, true);
  auto read_fn = make_shard_reader(opt.shards, cfg.block_bytes(), -1);

  std::vector<std::pair<u32, csd::ec::Block>> survivors;
  for (u32 i = 0; i < cfg.total(); ++i) {
    if (auto block = read_fn(i)) survivors.emplace_back(i, std::move(*block));
  }
  std::vector<csd::ec::Block> data = cfg.is_rs ? csd::ec::rs_decode(cfg.rs, survivors)
                                               : csd::ec::lrc_decode_global(cfg.lrc, survivors);
  std::vector<csd::u8> out_bytes;
  out_bytes.reserve(static_cast<size_t>(cfg.k()) * cfg.block_bytes());
  for (const auto& block : data) out_bytes.insert(out_bytes.end(), block.begin(), block.end());
  if (cfg.data_bytes > 0 && cfg.data_bytes < out_bytes.size()) {
    out_bytes.resize(cfg.data_bytes);
  }
  write_file(opt.out, out_bytes);
  std::cout << "decoded " << out_bytes.size() << " bytes from " << survivors.size()
            << " shards\n";
  return 0;
}

int run_ec_repair(const EcOpts& opt) {
  if (opt.shards.empty() || opt.lost < 0) {
    throw Error(ErrorCode::kInvalidConfig, "ec repair needs --shards and --lost");
  }
  EcOpts local = opt;
  if (local.rs.empty() && local.lrc.empty() && local.manifest.empty()) {
    local.manifest = manifest_path(opt.shards);
  }
  EcResolved cfg = resolve_ec_config(local, true);
  if (static_cast<u32>(opt.lost) >= cfg.total()) {
    throw Error(ErrorCode::kInvalidConfig, "--lost index out of range");
  }
  auto read_fn = make_shard_reader(opt.shards, cfg.block_bytes(), opt.lost);

  csd::ec::Block recovered;
  csd::ec::RepairReport report;
  if (cfg.is_rs) {
    std::tie(recovered, report) = csd::ec::rs_repair(cfg.rs, static_cast<u32>(opt.lost), read_fn);
  } else {
    std::tie(recovered, report) =
        csd::ec::lrc_repair_single(cfg.lrc, static_cast<u32>(opt.lost), read_fn);
  }
  std::string dest = opt.out.empty() ? shard_path(opt.shards, static_cast<u32>(opt.lost))
                                     : opt.out;
  write_file(dest, recovered);
  nlohmann::json j{{"recovered_index", report.recovered_index},
                   {"blocks_read", report.blocks_read},
                   {"bytes_read", report.bytes_read},
                   {"output", dest}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

// --- fi ---

struct FiOpts {
  std::string plan;
  std::string trace;
  std::string config;
  std::string out;
  std::string scan;
  u64 seed = 1;
};

int run_fi(const FiOpts& opt) {
  if (opt.plan.empty() || opt.trace.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "fi run needs --plan and --trace");
  }
  csd::fi::FaultPlan plan = csd::fi::load_fault_plan(opt.plan);
  auto records = csd::bench::load_trace(opt.trace);
  auto dev_cfg = make_device_config(opt.config, opt.seed);
  csd::fi::validate_plan(plan, dev_cfg.block_size);

  // Clean pass first: the expected digests come from the same workload with
  // no faults installed.
  std::map<u64, u64> expected;
  {
    csd::device::Device clean(dev_cfg);
    csd::api::Session session(clean);
    csd::bench::replay_trace(session, records);
    expected = csd::fi::digest_live_blocks(clean);
  }

  csd::device::Device dev(dev_cfg);
  csd::api::Session session(dev);
  csd::fi::FaultEngine engine(session, plan);
  csd::bench::ReplayResult replay = csd::bench::replay_trace(session, records);
  std::vector<u64> corrupted = csd::fi::checksum_scan(dev, expected);

  std::string log_text = csd::fi::serialize_injection_log(engine.log());
  if (opt.out.empty()) {
    std::cout << log_text;
  } else {
    open_out(opt.out) << log_text;
  }
  nlohmann::json scan_json{{"corrupted_lbas", corrupted}};
  if (!opt.scan.empty()) open_out(opt.scan) << scan_json.dump(2) << '\n';

  std::ostream& info = opt.out.empty() ? std::cerr : std::cout;
  info << "replayed " << records.size() << " records (" << replay.read_errors
       << " read errors, " << replay.write_rejections << " writes rejected), "
       << engine.log().size() << " injections, " << corrupted.size()
       << " corrupted LBAs\n";
  if (!replay.first_error.empty()) info << "first error: " << replay.first_error << '\n';
  return 0;
}

// --- rdr ---

struct RdrOpts {
  std::string trace;
  std::string config;
  std::string out;
  std::string report;
  std::string snapshot_out;
  std::string freeze = "none";
  u64 seed = 1;
  u32 window = 64;
  u64 budget = 64ULL * 1024 * 1024;
  std::optional<u64> recover_to;
  std::optional<u64> recover_seq;  // recovery point = device time after this record
};

int run_rdr(const RdrOpts& opt) {
  if (opt.trace.empty()) throw Error(ErrorCode::kInvalidConfig, "rdr replay needs --trace");
  if (opt.recover_to.has_value() && opt.recover_seq.has_value()) {
    throw Error(ErrorCode::kInvalidConfig, "give --recover-to or --recover-to-seq, not both");
  }
  auto records = csd::bench::load_trace(opt.trace);

  csd::rdr::MonitorConfig mcfg;
  mcfg.window = opt.window;
  mcfg.shadow_budget = opt.budget;
  if (opt.freeze == "none") {
    mcfg.freeze = csd::rdr::FreezePolicy::kNone;
  } else if (opt.freeze == "block") {
    mcfg.freeze = csd::rdr::FreezePolicy::kBlock;
  } else if (opt.freeze == "retain-all") {
    mcfg.freeze = csd::rdr::FreezePolicy::kRetainAll;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "--freeze must be none, block, or retain-all");
  }

  csd::device::Device dev(make_device_config(opt.config, opt.seed));
  csd::api::Session session(dev);
  csd::rdr::Monitor monitor(session, mcfg);
  std::optional<u64> boundary_ns;
  csd::bench::ReplayResult replay =
      csd::bench::replay_trace(session, records, [&](const csd::bench::IoTraceRecord& rec) {
        if (opt.recover_seq.has_value() && rec.seq == *opt.recover_seq) {
          boundary_ns = dev.now_ns();
        }
      });
  if (opt.recover_seq.has_value() && !boundary_ns.has_value()) {
    throw Error(ErrorCode::kInvalidConfig,
                "--recover-to-seq " + std::to_string(*opt.recover_seq) + " not in trace");
  }

  std::string verdict_text = csd::rdr::serialize_verdicts(monitor.verdicts());
  if (opt.out.empty()) {
    std::cout << verdict_text;
  } else {
    open_out(opt.out) << verdict_text;
  }

  u64 benign = 0, suspicious = 0, ransomware = 0;
  for (const auto& v : monitor.verdicts()) {
    switch (v.level) {
      case csd::rdr::ThreatLevel::kBenign: ++benign; break;
      case csd::rdr::ThreatLevel::kSuspicious: ++suspicious; break;
      case csd::rdr::ThreatLevel::kRansomware: ++ransomware; break;
    }
  }
  std::ostream& info = opt.out.empty() ? std::cerr : std::cout;
  info << "replayed " << records.size() << " records (" << replay.write_rejections
       << " writes rejected); verdicts: " << benign << " benign, " << suspicious
       << " suspicious, " << ransomware << " ransomware"
       << (monitor.frozen() ? "; device frozen" : "") << '\n';

  if (opt.recover_to.has_value() || boundary_ns.has_value()) {
    u64 t = boundary_ns.has_value() ? *boundary_ns : *opt.recover_to;
    csd::rdr::RecoveryReport rec = monitor.recover_to(t);
    std::string text = csd::rdr::serialize_recovery_report(rec);
    if (opt.report.empty()) {
      std::cout << text;
    } else {
      open_out(opt.report) << text;
      info << "restored " << rec.blocks_restored << " blocks, "
           << rec.unrecoverable_lbas.size() << " unrecoverable\n";
    }
  }
  if (!opt.snapshot_out.empty()) {
    dev.save_snapshot(opt.snapshot_out);
    info << "flash image saved to " << opt.snapshot_out << '\n';
  }
  return 0;
}

// --- device ---

struct DeviceOpts {
  std::string config;
  std::string trace;
  std::string in;
  std::string out;
  u64 seed = 1;
};

int run_device_snapshot(const DeviceOpts& opt) {
  if (opt.out.empty()) throw Error(ErrorCode::kInvalidConfig, "device snapshot needs --out");
  csd::device::Device dev(make_device_config(opt.config, opt.seed));
  if (!opt.trace.empty()) {
    csd::api::Session session(dev);
    csd::bench::replay_trace(session, csd::bench::load_trace(opt.trace));
  }
  dev.save_snapshot(opt.out);
  std::cout << "saved " << dev.num_live_blocks() << " live blocks ("
            << dev.block_size() << " B each) to " << opt.out << '\n';
  return 0;
}

int run_device_restore(const DeviceOpts& opt) {
  if (opt.in.empty()) throw Error(ErrorCode::kInvalidConfig, "device restore needs --in");
  csd::device::Device dev(make_device_config(opt.config, opt.seed));
  dev.load_snapshot(opt.in);
  std::cout << "restored image: block_size " << dev.block_size() << ", "
            << dev.config().num_blocks << " blocks, " << dev.num_live_blocks()
            << " live\n";
  if (!opt.out.empty()) {
    dev.save_snapshot(opt.out);
    std::cout << "re-saved to " << opt.out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CSD simulator and data-protection service driver"};
  app.require_subcommand(1);

  // bench
  auto* bench = app.add_subcommand("bench", "matrix benchmark and result reports");
  bench->require_subcommand(1);
  BenchOpts bench_opts;
  auto* bench_matmul = bench->add_subcommand("matmul", "run the dual-path matmul protocol");
  bench_matmul->add_option("--config", bench_opts.config, "device config file");
  bench_matmul->add_option("--seed", bench_opts.seed, "seed for matrices and jitter");
  bench_matmul->add_option("--dims", bench_opts.dims, "comma-separated matrix dims");
  bench_matmul->add_option("--reps-transfer", bench_opts.reps_transfer, "transfer repetitions");
  bench_matmul->add_option("--reps-kernel", bench_opts.reps_kernel, "kernel repetitions");
  bench_matmul->add_option("--mode", bench_opts.mode, "simulated or live-software");
  bench_matmul->add_option("--out", bench_opts.out, "CSV output file (default stdout)");

  std::string report_csv;
  auto* bench_report = bench->add_subcommand("report", "latency reduction from a result CSV");
  bench_report->add_option("csv", report_csv, "bench matmul CSV")->required();

  // ec
  auto* ec = app.add_subcommand("ec", "erasure-code files");
  ec->require_subcommand(1);
  EcOpts ec_opts;
  auto add_ec_common = [&](CLI::App* cmd) {
    cmd->add_option("--rs", ec_opts.rs, "RS geometry k,m");
    cmd->add_option("--lrc", ec_opts.lrc, "LRC geometry k,l,g");
    cmd->add_option("--manifest", ec_opts.manifest, "manifest JSON path");
    cmd->add_option("--shards", ec_opts.shards, "shard path prefix");
    cmd->add_option("--block-bytes", ec_opts.block_bytes, "bytes per block");
  };
  auto* ec_encode = ec->add_subcommand("encode", "split and encode a file into shards");
  add_ec_common(ec_encode);
  ec_encode->add_option("--in", ec_opts.in, "input file");
  auto* ec_decode = ec->add_subcommand("decode", "rebuild the file from surviving shards");
  add_ec_common(ec_decode);
  ec_decode->add_option("--out", ec_opts.out, "output file");
  auto* ec_repair = ec->add_subcommand("repair", "regenerate one lost shard");
  add_ec_common(ec_repair);
  ec_repair->add_option("--lost", ec_opts.lost, "stripe index to repair");
  ec_repair->add_option("--out", ec_opts.out, "recovered shard destination");

  // fi
  auto* fi = app.add_subcommand("fi", "fault injection");
  fi->require_subcommand(1);
  FiOpts fi_opts;
  auto* fi_run = fi->add_subcommand("run", "replay a workload under a fault plan");
  fi_run->add_option("--plan", fi_opts.plan, "fault plan JSON");
  fi_run->add_option("--trace", fi_opts.trace, "workload trace JSONL");
  fi_run->add_option("--config", fi_opts.config, "device config file");
  fi_run->add_option("--seed", fi_opts.seed, "device jitter seed");
  fi_run->add_option("--out", fi_opts.out, "injection log JSONL (default stdout)");
  fi_run->add_option("--scan", fi_opts.scan, "checksum scan report JSON");

  // rdr
  auto* rdr = app.add_subcommand("rdr", "ransomware detection and recovery");
  rdr->require_subcommand(1);
  RdrOpts rdr_opts;
  u64 recover_to_arg = 0;
  auto* rdr_replay = rdr->add_subcommand("replay", "replay a trace under the monitor");
  rdr_replay->add_option("--trace", rdr_opts.trace, "workload trace JSONL");
  rdr_replay->add_option("--config", rdr_opts.config, "device config file");
  rdr_replay->add_option("--seed", rdr_opts.seed, "device jitter seed");
  rdr_replay->add_option("--window", rdr_opts.window, "detection window size");
  rdr_replay->add_option("--budget", rdr_opts.budget, "shadow store budget, bytes");
  rdr_replay->add_option("--freeze", rdr_opts.freeze, "freeze policy: none, block, retain-all");
  rdr_replay->add_option("--out", rdr_opts.out, "verdict JSONL (default stdout)");
  auto* recover_opt = rdr_replay->add_option("--recover-to", recover_to_arg,
                                             "restore blocks overwritten after this time (ns)");
  u64 recover_seq_arg = 0;
  auto* recover_seq_opt =
      rdr_replay->add_option("--recover-to-seq", recover_seq_arg,
                             "restore to the state right after this trace seq");
  rdr_replay->add_option("--report", rdr_opts.report, "recovery report JSON");
  rdr_replay->add_option("--snapshot-out", rdr_opts.snapshot_out,
                         "save the final flash image here");

  // device
  auto* devcmd = app.add_subcommand("device", "snapshot and restore device images");
  devcmd->require_subcommand(1);
  DeviceOpts dev_opts;
  auto* dev_snap = devcmd->add_subcommand("snapshot", "save the flash image");
  dev_snap->add_option("--config", dev_opts.config, "device config file");
  dev_snap->add_option("--seed", dev_opts.seed, "device jitter seed");
  dev_snap->add_option("--trace", dev_opts.trace, "workload to replay before saving");
  dev_snap->add_option("--out", dev_opts.out, "image file");
  auto* dev_restore = devcmd->add_subcommand("restore", "load a flash image");
  dev_restore->add_option("--in", dev_opts.in, "image file");
  dev_restore->add_option("--out", dev_opts.out, "re-save destination");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (bench_matmul->parsed()) return run_bench_matmul(bench_opts);
    if (bench_report->parsed()) return run_bench_report(report_csv);
    if (ec_encode->parsed()) return run_ec_encode(ec_opts);
    if (ec_decode->parsed()) return run_ec_decode(ec_opts);
    if (ec_repair->parsed()) return run_ec_repair(ec_opts);
    if (fi_run->parsed()) return run_fi(fi_opts);
    if (rdr_replay->parsed()) {
      if (recover_opt->count() > 0) rdr_opts.recover_to = recover_to_arg;
      if (recover_seq_opt->count() > 0) rdr_opts.recover_seq = recover_seq_arg;
      return run_rdr(rdr_opts);
    }
    if (dev_snap->parsed()) return run_device_snapshot(dev_opts);
    if (dev_restore->parsed()) return run_device_restore(dev_opts);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    bool file_error =
        e.code() == ErrorCode::kParseError || e.code() == ErrorCode::kMissingPath;
    return file_error ? 3 : 2;
  } catch (const IoFailure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
