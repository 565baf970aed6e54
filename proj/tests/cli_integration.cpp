// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the csdguard binary: every subcommand is exercised
// through a shell invocation against real files, including the documented
// exit codes (0 success, 1 usage, 2 domain error, 3 file/parse error).
// argv[1] is the path to the csdguard executable.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "csd/bench/bench.hpp"
#include "csd/bench/trace.hpp"
#include "csd/device/config_io.hpp"
#include "csd/fi/rules.hpp"

namespace fs = std::filesystem;

using csd::u32;
using csd::u64;
using csd::u8;

namespace {

int g_failures = 0;

void expect(bool ok, const std::string& what) {
  if (ok) return;
  ++g_failures;
  std::cerr << "FAIL: " << what << '\n';
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string g_binary;
fs::path g_scratch;

// Runs `csdguard <args>` with stdout/stderr captured to scratch files.
RunResult run_cli(const std::string& args) {
  fs::path out_file = g_scratch / "stdout.txt";
  fs::path err_file = g_scratch / "stderr.txt";
  std::string cmd = "\"" + g_binary + "\" " + args + " > \"" + out_file.string() +
                    "\" 2> \"" + err_file.string() + "\"";
  int status = std::system(cmd.c_str());
  RunResult result;
  if (status != -1 && WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// A small namespace keeps snapshots a few hundred KiB instead of the
// default 64 MiB image.
fs::path write_small_config() {
  csd::device::DeviceConfig cfg;
  cfg.block_size = 512;
  cfg.num_blocks = 2048;
  fs::path path = g_scratch / "small.cfg";
  csd::device::save_device_config(cfg, path);
  return path;
}

void check_exit_codes() {
  expect(run_cli("").exit_code == 1, "bare invocation exits 1");
  expect(run_cli("no-such-command").exit_code == 1, "unknown subcommand exits 1");
  expect(run_cli("bench").exit_code == 1, "bench without subcommand exits 1");

  RunResult missing_trace = run_cli("rdr replay --trace " + (g_scratch / "absent.jsonl").string());
  expect(missing_trace.exit_code == 3, "missing trace file exits 3");
  expect(contains(missing_trace.err, "cannot open"), "missing trace names the problem");

  RunResult missing_plan =
      run_cli("fi run --plan " + (g_scratch / "absent.json").string() + " --trace " +
              (g_scratch / "absent.jsonl").string());
  expect(missing_plan.exit_code == 3, "missing fault plan exits 3");

  RunResult missing_image = run_cli("device restore --in " + (g_scratch / "absent.img").string());
  expect(missing_image.exit_code == 3, "missing device image exits 3");
}

void check_bench() {
  fs::path csv = g_scratch / "bench.csv";
  RunResult run = run_cli("bench matmul --dims 8,16 --reps-transfer 6 --reps-kernel 3 --seed 3 --out " +
                          csv.string());
  expect(run.exit_code == 0, "bench matmul exits 0");
  expect(contains(run.out, "dim"), "bench summary mentions the dims");

  std::vector<csd::bench::PhaseStats> rows = csd::bench::load_csv(csv.string());
  expect(rows.size() == 16, "two dims yield 16 CSV rows, got " + std::to_string(rows.size()));
  csd::bench::ReductionReport red = csd::bench::report_latency_reduction(rows);
  expect(red.per_dim.size() == 2, "reduction report covers both dims");

  RunResult report = run_cli("bench report " + csv.string());
  expect(report.exit_code == 0, "bench report exits 0");
  expect(contains(report.out, "max: "), "bench report prints the headline");
  expect(contains(report.out, "% at dim"), "bench report names the best dim");

  expect(run_cli("bench report " + (g_scratch / "absent.csv").string()).exit_code == 3,
         "bench report on a missing CSV exits 3");
}

void check_ec_rs() {
  std::vector<u8> input(1000);
  for (size_t i = 0; i < input.size(); ++i) input[i] = static_cast<u8>(i * 7 + 3);
  fs::path in_path = g_scratch / "payload.bin";
  spit(in_path, std::string(input.begin(), input.end()));
  std::string shards = (g_scratch / "rs_stripe").string();

  RunResult enc = run_cli("ec encode --rs 4,2 --block-bytes 300 --in " + in_path.string() +
                          " --shards " + shards);
  expect(enc.exit_code == 0, "rs encode exits 0");
  expect(contains(enc.out, "wrote 6 shards"), "rs encode reports 6 shards");
  for (u32 i = 0; i < 6; ++i) {
    expect(fs::file_size(shards + "." + std::to_string(i)) == 300,
           "shard " + std::to_string(i) + " is one block");
  }
  expect(fs::exists(shards + ".manifest.json"), "encode leaves a manifest");

  // Losing one data and one parity shard still leaves k survivors.
  std::string shard1 = slurp(shards + ".1");
  fs::remove(shards + ".1");
  fs::remove(shards + ".4");

  fs::path decoded = g_scratch / "decoded.bin";
  RunResult dec = run_cli("ec decode --shards " + shards + " --out " + decoded.string());
  expect(dec.exit_code == 0, "rs decode with two erasures exits 0");
  expect(slurp(decoded) == std::string(input.begin(), input.end()),
         "decode reproduces the original bytes");

  RunResult rep = run_cli("ec repair --shards " + shards + " --lost 1");
  expect(rep.exit_code == 0, "rs repair exits 0");
  expect(slurp(shards + ".1") == shard1, "repair rebuilds the lost shard bit for bit");
  nlohmann::json rep_json = nlohmann::json::parse(rep.out, nullptr, false);
  expect(!rep_json.is_discarded() && rep_json["blocks_read"] == 4,
         "rs repair reads k survivors");

  // Three erasures exceed m=2.
  fs::remove(shards + ".0");
  fs::remove(shards + ".2");
  fs::remove(shards + ".4");
  RunResult fail = run_cli("ec decode --shards " + shards + " --out " + decoded.string());
  expect(fail.exit_code == 2, "decode below k survivors exits 2");
  expect(contains(fail.err, "error"), "decode failure goes to stderr");

  RunResult both = run_cli("ec encode --rs 4,2 --lrc 4,2,2 --in " + in_path.string() +
                           " --shards " + shards);
  expect(both.exit_code == 2, "encode with both --rs and --lrc exits 2");
}

void check_ec_lrc() {
  std::vector<u8> input(700);
  for (size_t i = 0; i < input.size(); ++i) input[i] = static_cast<u8>(i ^ 0x5c);
  fs::path in_path = g_scratch / "payload2.bin";
  spit(in_path, std::string(input.begin(), input.end()));
  std::string shards = (g_scratch / "lrc_stripe").string();

  RunResult enc = run_cli("ec encode --lrc 4,2,2 --block-bytes 200 --in " + in_path.string() +
                          " --shards " + shards);
  expect(enc.exit_code == 0, "lrc encode exits 0");
  expect(contains(enc.out, "wrote 8 shards"), "lrc(4,2,2) emits k+l+g shards");

  std::string shard0 = slurp(shards + ".0");
  fs::remove(shards + ".0");
  RunResult rep = run_cli("ec repair --shards " + shards + " --lost 0");
  expect(rep.exit_code == 0, "lrc repair exits 0");
  expect(slurp(shards + ".0") == shard0, "lrc repair rebuilds the data shard");
  nlohmann::json rep_json = nlohmann::json::parse(rep.out, nullptr, false);
  expect(!rep_json.is_discarded() && rep_json["blocks_read"] == 2,
         "single loss repairs from the 2-block local group, not all k");
}

void check_fi(const fs::path& cfg) {
  csd::fi::FaultPlan plan;
  plan.seed = 11;
  {
    csd::fi::FaultRule rule;
    rule.rule_id = "flip-writes";
    rule.lba.kind = csd::fi::LbaPredicate::Kind::kRange;
    rule.lba.lo = 0;
    rule.lba.hi = 31;
    rule.op = csd::fi::OpMask::kWrite;
    rule.occurrence.kind = csd::fi::Occurrence::Kind::kProbability;
    rule.occurrence.p = 0.5;
    rule.action.kind = csd::fi::FaultAction::Kind::kBitFlip;
    rule.action.byte_offset = 7;
    rule.action.bit = 2;
    plan.rules.push_back(rule);
  }
  {
    csd::fi::FaultRule rule;
    rule.rule_id = "late-lag";
    rule.occurrence.kind = csd::fi::Occurrence::Kind::kAfter;
    rule.occurrence.n = 50;
    rule.action.kind = csd::fi::FaultAction::Kind::kDelay;
    rule.action.delay_ns = 1000;
    plan.rules.push_back(rule);
  }
  fs::path plan_path = g_scratch / "plan.json";
  csd::fi::save_fault_plan(plan, plan_path);

  fs::path trace_path = g_scratch / "mixed.jsonl";
  csd::bench::save_trace(trace_path.string(), csd::bench::make_mixed_trace(0, 32, 120, 5));

  std::string base = "fi run --plan " + plan_path.string() + " --trace " + trace_path.string() +
                     " --config " + cfg.string() + " --seed 9";
  fs::path log1 = g_scratch / "log1.jsonl";
  fs::path scan1 = g_scratch / "scan1.json";
  RunResult first = run_cli(base + " --out " + log1.string() + " --scan " + scan1.string());
  expect(first.exit_code == 0, "fi run exits 0");
  expect(contains(first.out, "injections"), "fi run reports the injection count");

  fs::path log2 = g_scratch / "log2.jsonl";
  fs::path scan2 = g_scratch / "scan2.json";
  RunResult second = run_cli(base + " --out " + log2.string() + " --scan " + scan2.string());
  expect(second.exit_code == 0, "second fi run exits 0");
  expect(slurp(log1) == slurp(log2), "same seed yields a byte-identical injection log");
  expect(slurp(scan1) == slurp(scan2), "same seed yields a byte-identical scan report");

  std::string log_text = slurp(log1);
  expect(!log_text.empty(), "probability 0.5 over 120 records fires at least once");
  std::istringstream lines(log_text);
  std::string line;
  size_t parsed = 0;
  while (std::getline(lines, line)) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("rule_id") || !j.contains("action")) break;
    ++parsed;
  }
  expect(parsed > 0 && !lines.good(), "every log line is JSON with rule_id and action");

  nlohmann::json scan = nlohmann::json::parse(slurp(scan1), nullptr, false);
  expect(!scan.is_discarded() && scan.contains("corrupted_lbas") &&
             !scan["corrupted_lbas"].empty(),
         "bit flips on the write path leave corrupted LBAs behind");
}

// Replays a benign-then-attack trace under the monitor, recovers to the
// pre-attack point, and checks the saved image equals a straight replay of
// just the benign phase.
void check_rdr_and_snapshots(const fs::path& cfg) {
  std::vector<csd::bench::IoTraceRecord> prep;
  for (u64 i = 0; i < 24; ++i) {
    csd::bench::IoTraceRecord rec;
    rec.seq = i;
    rec.time_ns = i * 1000;
    rec.op = csd::bench::TraceOp::kWrite;
    rec.lba = i;
    rec.payload = std::vector<u8>(512, static_cast<u8>(0x40 + i));
    prep.push_back(rec);
  }
  fs::path prep_path = g_scratch / "prep.jsonl";
  csd::bench::save_trace(prep_path.string(), prep);

  std::vector<csd::bench::IoTraceRecord> full = prep;
  std::vector<csd::bench::IoTraceRecord> attack =
      csd::bench::make_attack_trace(4, 10, 99, /*start_seq=*/24, /*start_time_ns=*/24000);
  full.insert(full.end(), attack.begin(), attack.end());
  fs::path full_path = g_scratch / "full.jsonl";
  csd::bench::save_trace(full_path.string(), full);

  fs::path verdicts = g_scratch / "verdicts.jsonl";
  fs::path report = g_scratch / "recovery.json";
  fs::path after_img = g_scratch / "after.img";
  RunResult replay = run_cli("rdr replay --config " + cfg.string() + " --seed 5 --trace " +
                             full_path.string() + " --window 16 --out " + verdicts.string() +
                             " --recover-to-seq 23 --report " + report.string() +
                             " --snapshot-out " + after_img.string());
  expect(replay.exit_code == 0, "rdr replay exits 0");
  expect(contains(replay.out, "ransomware"), "replay summary counts ransomware verdicts");
  expect(contains(slurp(verdicts), "\"level\":\"ransomware\""),
         "the attack phase produces ransomware verdicts");

  nlohmann::json rec = nlohmann::json::parse(slurp(report), nullptr, false);
  expect(!rec.is_discarded() && rec["blocks_restored"] == 10,
         "all ten attacked blocks come back");
  expect(rec["unrecoverable_lbas"].empty(), "nothing is unrecoverable");

  fs::path prep_img = g_scratch / "prep.img";
  RunResult snap = run_cli("device snapshot --config " + cfg.string() + " --seed 5 --trace " +
                           prep_path.string() + " --out " + prep_img.string());
  expect(snap.exit_code == 0, "device snapshot exits 0");
  expect(contains(snap.out, "saved 24 live blocks"), "snapshot reports the live count");
  expect(slurp(after_img) == slurp(prep_img),
         "recovered image is byte-identical to the pre-attack image");

  fs::path resaved = g_scratch / "resaved.img";
  RunResult restore =
      run_cli("device restore --in " + prep_img.string() + " --out " + resaved.string());
  expect(restore.exit_code == 0, "device restore exits 0");
  expect(contains(restore.out, "24 live"), "restore reports the live count");
  expect(slurp(resaved) == slurp(prep_img), "restore round-trips the image bytes");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_integration <csdguard-binary>\n";
    return 1;
  }
  g_binary = argv[1];
  g_scratch = fs::current_path() / "cli_integration_scratch";
  fs::remove_all(g_scratch);
  fs::create_directories(g_scratch);

  fs::path cfg = write_small_config();
  check_exit_codes();
  check_bench();
  check_ec_rs();
  check_ec_lrc();
  check_fi(cfg);
  check_rdr_and_snapshots(cfg);

  if (g_failures == 0) {
    std::cout << "cli integration: all checks passed\n";
    return 0;
  }
  std::cerr << "cli integration: " << g_failures << " check(s) failed\n";
  return 1;
}
