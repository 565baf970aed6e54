// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "doctest.h"

#include "csd/bench/bench.hpp"
#include "csd/bench/trace.hpp"
#include "csd/kernels/registry.hpp"
#include "csd/rdr/monitor.hpp"
#include "csd/util/rng.hpp"

using namespace csd;
using namespace csd::bench;
using csd::api::Session;
using csd::device::Device;
using csd::device::DeviceConfig;

namespace {

DeviceConfig bench_config(double jitter = 0.0) {
  DeviceConfig cfg;
  cfg.block_size = 512;
  cfg.num_blocks = 4096;
  cfg.timing.jitter_fraction = jitter;
  // Anchor the kernel model down at test-sized dims so tiny runs still
  // exercise interpolation.
  cfg.timing.sw_anchors = {{8, 0.0001}, {64, 0.05}};
  cfg.timing.hw_anchors = {{8, 0.00003}, {64, 0.036}};
  cfg.timing.max_hw_dim = 64;
  return cfg;
}

IoTraceRecord trace_write(u64 seq, u64 lba, std::vector<u8> payload) {
  IoTraceRecord r;
  r.seq = seq;
  r.time_ns = seq * 10;
  r.op = TraceOp::kWrite;
  r.lba = lba;
  r.len_blocks = payload.size() / 512;
  r.payload = std::move(payload);
  return r;
}

IoTraceRecord trace_digest_write(u64 seq, u64 lba, u64 len, u64 digest) {
  IoTraceRecord r;
  r.seq = seq;
  r.time_ns = seq * 10;
  r.op = TraceOp::kWrite;
  r.lba = lba;
  r.len_blocks = len;
  r.payload_digest = digest;
  return r;
}

IoTraceRecord trace_read(u64 seq, u64 lba, u64 len = 1) {
  IoTraceRecord r;
  r.seq = seq;
  r.time_ns = seq * 10;
  r.op = TraceOp::kRead;
  r.lba = lba;
  r.len_blocks = len;
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("bench");

TEST_CASE("traces round trip through jsonl with both payload forms") {
  std::vector<IoTraceRecord> records;
  records.push_back(trace_read(0, 5, 2));
  std::vector<u8> inline_payload(512);
  for (size_t i = 0; i < inline_payload.size(); ++i) {
    inline_payload[i] = static_cast<u8>(i * 7);
  }
  records.push_back(trace_write(1, 9, inline_payload));
  records.push_back(trace_digest_write(4, 12, 3, 0xFEEDFACE));

  std::ostringstream out;
  serialize_trace(out, records);
  std::istringstream in(out.str());
  auto back = parse_trace(in, "roundtrip");
  REQUIRE(back.size() == 3);
  CHECK(back[0].op == TraceOp::kRead);
  CHECK(back[0].lba == 5);
  CHECK(back[0].len_blocks == 2);
  CHECK_FALSE(back[0].payload.has_value());
  CHECK(back[1].payload == inline_payload);
  CHECK_FALSE(back[1].payload_digest.has_value());
  CHECK(back[2].payload_digest == 0xFEEDFACEULL);
  CHECK(back[2].seq == 4);
  CHECK(back[2].time_ns == 40);

  // Serializing the parsed records reproduces the file byte for byte.
  std::ostringstream again;
  serialize_trace(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("trace parser pins errors to their line") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      parse_trace(in, "t.jsonl");
      FAIL("expected ParseError for: " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParseError);
      if (std::string(e.what()).find(needle) == std::string::npos) {
        FAIL("message '" << e.what() << "' lacks '" << needle << "'");
      }
    }
  };
  std::string good =
      R"({"seq":0,"time_ns":0,"op":"read","lba":1,"len_blocks":1})" "\n";

  expect_error(good + "{not json\n", "t.jsonl:2");
  expect_error(R"({"seq":0,"op":"munge","lba":1,"len_blocks":1,"time_ns":0})" "\n", "op");
  expect_error(
      R"({"seq":0,"op":"write","lba":1,"len_blocks":1,"time_ns":0})" "\n", "payload");
  expect_error(
      R"({"seq":0,"op":"write","lba":1,"len_blocks":1,"time_ns":0,)"
      R"("payload_b64":"AA==","payload_digest":3})" "\n", "payload");
  expect_error(
      R"({"seq":0,"op":"read","lba":1,"len_blocks":1,"time_ns":0,"payload_digest":3})"
      "\n", "read");
  expect_error(
      R"({"seq":0,"op":"read","lba":1,"len_blocks":1,"time_ns":0,"extra":1})" "\n",
      "extra");
  expect_error(good + good, "seq");  // not strictly increasing
  expect_error(
      R"({"seq":0,"op":"read","lba":1,"len_blocks":0,"time_ns":0})" "\n", "len_blocks");
  expect_error(
      R"({"seq":0,"op":"write","lba":1,"len_blocks":1,"time_ns":0,"payload_b64":"!!"})"
      "\n", "t.jsonl:1");
}

TEST_CASE("payload materialization is exact for inline and deterministic for digests") {
  auto inline_rec = trace_write(0, 0, std::vector<u8>(1024, 0xAB));
  auto bytes = materialize_payload(inline_rec, 512);
  REQUIRE(bytes.size() == 1024);
  CHECK(std::all_of(bytes.begin(), bytes.end(),
                    [](std::byte b) { return b == std::byte{0xAB}; }));
  // Inline length must match len_blocks * block_size.
  CHECK_THROWS_AS(materialize_payload(inline_rec, 4096), Error);

  auto digest_rec = trace_digest_write(0, 0, 4, 77);
  auto first = materialize_payload(digest_rec, 512);
  auto second = materialize_payload(digest_rec, 512);
  REQUIRE(first.size() == 4 * 512);
  CHECK(first == second);
  auto other = materialize_payload(trace_digest_write(0, 0, 4, 78), 512);
  CHECK(first != other);

  // Synthesized payloads look like ciphertext to the entropy detector.
  CHECK(rdr::shannon_entropy_bits_per_byte(first) > 7.8);

  CHECK_THROWS_AS(materialize_payload(trace_read(0, 0), 512), Error);
}

TEST_CASE("replay drives the device and counts per-record failures without aborting") {
  DeviceConfig cfg = bench_config();
  cfg.num_blocks = 64;
  Device dev(cfg);
  Session session(dev);

  std::vector<IoTraceRecord> records;
  records.push_back(trace_write(0, 3, std::vector<u8>(512, 0x11)));
  records.push_back(trace_digest_write(1, 4, 2, 555));
  records.push_back(trace_read(2, 3));
  records.push_back(trace_read(3, 60, 10));  // runs past the namespace end
  records.push_back(trace_write(4, 63, std::vector<u8>(2 * 512, 0x22)));  // also oob
  records.push_back(trace_read(5, 4));

  u64 callbacks = 0;
  u64 last_seq = 0;
  auto result = replay_trace(session, records, [&](const IoTraceRecord& r) {
    ++callbacks;
    last_seq = r.seq;
  });
  CHECK(result.writes_ok == 2);
  CHECK(result.reads_ok == 2);
  CHECK(result.read_errors == 1);
  CHECK(result.write_rejections == 1);
  CHECK_FALSE(result.first_error.empty());
  CHECK(callbacks == 6);  // the callback runs for failed records too
  CHECK(last_seq == 5);

  CHECK(dev.peek_block(3) == std::vector<std::byte>(512, std::byte{0x11}));
  auto want = materialize_payload(records[1], 512);
  CHECK(dev.peek_block(4) == std::vector<std::byte>(want.begin(), want.begin() + 512));
}

TEST_CASE("workload builders emit well-formed traces with the advertised shapes") {
  auto benign = make_benign_trace(10, 5, 512, 3, 1000);
  REQUIRE(benign.size() == 5);
  for (size_t i = 0; i < benign.size(); ++i) {
    CHECK(benign[i].op == TraceOp::kWrite);
    CHECK(benign[i].seq == 3 + i);
    CHECK(benign[i].lba == 10 + i);
    REQUIRE(benign[i].payload.has_value());
    CHECK(std::all_of(benign[i].payload->begin(), benign[i].payload->end(),
                      [](u8 b) { return b == 0; }));
  }

  auto attack = make_attack_trace(10, 5, 42, 8);
  REQUIRE(attack.size() == 10);
  for (size_t i = 0; i < attack.size(); i += 2) {
    CHECK(attack[i].op == TraceOp::kRead);
    CHECK(attack[i + 1].op == TraceOp::kWrite);
    CHECK(attack[i].lba == attack[i + 1].lba);
    CHECK(attack[i + 1].payload_digest.has_value());
  }
  CHECK(attack.front().seq == 8);
  CHECK(attack.back().seq == 17);

  // Same seed, same trace; the mixed builder parses back cleanly too.
  auto attack2 = make_attack_trace(10, 5, 42, 8);
  CHECK(attack[1].payload_digest == attack2[1].payload_digest);

  auto mixed = make_mixed_trace(0, 32, 40, 7);
  REQUIRE(mixed.size() == 40);
  std::ostringstream out;
  serialize_trace(out, mixed);
  std::istringstream in(out.str());
  CHECK(parse_trace(in, "mixed").size() == 40);
  CHECK(std::any_of(mixed.begin(), mixed.end(),
                    [](const IoTraceRecord& r) { return r.op == TraceOp::kRead; }));
  CHECK(std::any_of(mixed.begin(), mixed.end(),
                    [](const IoTraceRecord& r) { return r.op == TraceOp::kWrite; }));
}

TEST_CASE("bench plans validate their shape") {
  BenchPlan plan;
  CHECK_NOTHROW(plan.validate());
  plan.dims = {};
  CHECK_THROWS_AS(plan.validate(), Error);
  plan = BenchPlan{};
  plan.dims = {0};
  CHECK_THROWS_AS(plan.validate(), Error);
  plan = BenchPlan{};
  plan.transfer_reps = 0;
  CHECK_THROWS_AS(plan.validate(), Error);
  plan = BenchPlan{};
  plan.kernel_reps = 0;
  CHECK_THROWS_AS(plan.validate(), Error);
}

TEST_CASE("a small simulated run produces a complete, internally consistent report") {
  Device dev(bench_config());
  Session session(dev);
  kernels::register_builtin_kernels(session);
  BenchPlan plan;
  plan.dims = {8, 16};
  plan.transfer_reps = 7;
  plan.kernel_reps = 4;
  auto report = run_bench(session, plan);

  REQUIRE(report.rows.size() == 16);  // 2 dims x 2 paths x 4 phases
  REQUIRE(report.dims.size() == 2);

  for (const auto& row : report.rows) {
    CHECK((row.dim == 8 || row.dim == 16));
    CHECK(row.bytes == static_cast<u64>(row.dim) * row.dim * 4);
    u32 want_reps = (row.phase == BenchPhase::kWrite || row.phase == BenchPhase::kRead)
                        ? plan.transfer_reps
                        : plan.kernel_reps;
    CHECK(row.reps == want_reps);
    CHECK(static_cast<double>(row.min_ns) <= row.mean_ns);
    CHECK(row.mean_ns <= static_cast<double>(row.max_ns));
    // Jitter is off: every repetition of a phase costs the same.
    CHECK(row.min_ns == row.max_ns);
    CHECK(row.stddev_ns == 0.0);
  }

  // Fixed row order per dim: csd write/read/kernel/end_to_end, then cpu.
  CHECK(report.rows[0].path == BenchPath::kCsd);
  CHECK(report.rows[0].phase == BenchPhase::kWrite);
  CHECK(report.rows[3].phase == BenchPhase::kEndToEnd);
  CHECK(report.rows[4].path == BenchPath::kCpu);

  for (const auto& dim : report.dims) {
    CHECK(dim.hw_supported);
    CHECK(dim.outputs_match);
    CHECK(dim.kernel_speedup > 1.0);  // the hw anchors are faster everywhere
    CHECK(dim.latency_reduction_pct > 0.0);
    CHECK(dim.transfer_share_pct > 0.0);
    CHECK(dim.transfer_share_pct < 100.0);
  }

  // The reduction report agrees with a direct reading of the rows.
  auto reduction = report_latency_reduction(report.rows);
  REQUIRE(reduction.per_dim.size() == 2);
  for (const auto& r : reduction.per_dim) {
    double csd = 0, cpu = 0;
    for (const auto& row : report.rows) {
      if (row.dim == r.dim && row.phase == BenchPhase::kEndToEnd) {
        (row.path == BenchPath::kCsd ? csd : cpu) = row.mean_ns;
      }
    }
    CHECK(r.pct == doctest::Approx(100.0 * (1.0 - csd / cpu)));
  }
  CHECK(reduction.best_pct >=
        std::max(reduction.per_dim[0].pct, reduction.per_dim[1].pct) - 1e-12);
}

TEST_CASE("kernel phases never jitter even when transfers do") {
  Device dev(bench_config(0.01));
  Session session(dev);
  kernels::register_builtin_kernels(session);
  BenchPlan plan;
  plan.dims = {16};
  plan.transfer_reps = 200;
  plan.kernel_reps = 40;
  auto report = run_bench(session, plan);

  bool saw_transfer_spread = false;
  for (const auto& row : report.rows) {
    if (row.phase == BenchPhase::kKernel) {
      CHECK(row.stddev_ns == 0.0);
      CHECK(row.min_ns == row.max_ns);
    }
    if (row.phase == BenchPhase::kWrite || row.phase == BenchPhase::kRead) {
      if (row.min_ns != row.max_ns) saw_transfer_spread = true;
    }
  }
  CHECK(saw_transfer_spread);
}

TEST_CASE("csv output round trips and is byte-stable across identical runs") {
  auto run_once = []() {
    Device dev(bench_config(0.01));  // jitter on: determinism must come from the seed
    Session session(dev);
    kernels::register_builtin_kernels(session);
    BenchPlan plan;
    plan.dims = {8, 16};
    plan.transfer_reps = 9;
    plan.kernel_reps = 3;
    plan.seed = 4;
    return run_bench(session, plan);
  };
  auto r1 = run_once();
  auto r2 = run_once();
  CHECK(csv_string(r1.rows) == csv_string(r2.rows));

  std::istringstream in(csv_string(r1.rows));
  auto parsed = parse_csv(in, "bench.csv");
  REQUIRE(parsed.size() == r1.rows.size());
  for (size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].dim == r1.rows[i].dim);
    CHECK(parsed[i].bytes == r1.rows[i].bytes);
    CHECK(parsed[i].path == r1.rows[i].path);
    CHECK(parsed[i].phase == r1.rows[i].phase);
    CHECK(parsed[i].reps == r1.rows[i].reps);
    CHECK(parsed[i].min_ns == r1.rows[i].min_ns);
    CHECK(parsed[i].max_ns == r1.rows[i].max_ns);
    // Means pass through the fixed three-decimal format.
    CHECK(parsed[i].mean_ns == doctest::Approx(r1.rows[i].mean_ns).epsilon(1e-3));
  }

  std::istringstream bad_header("dim,bytes\n");
  CHECK_THROWS_AS(parse_csv(bad_header, "bad"), Error);
  std::istringstream bad_row(
      "dim,bytes,path,phase,reps,mean_ns,min_ns,max_ns,stddev_ns\n1,2,csd\n");
  CHECK_THROWS_AS(parse_csv(bad_row, "bad"), Error);
  std::istringstream bad_path(
      "dim,bytes,path,phase,reps,mean_ns,min_ns,max_ns,stddev_ns\n"
      "8,256,gpu,write,1,1.000,1,1,0.000\n");
  CHECK_THROWS_AS(parse_csv(bad_path, "bad"), Error);
}

TEST_CASE("dims the hardware cannot synthesize keep only their cpu rows") {
  Device dev(bench_config());  // max_hw_dim = 64
  Session session(dev);
  kernels::register_builtin_kernels(session);
  BenchPlan plan;
  plan.dims = {96};
  plan.transfer_reps = 3;
  plan.kernel_reps = 2;
  auto report = run_bench(session, plan);

  REQUIRE(report.dims.size() == 1);
  CHECK_FALSE(report.dims[0].hw_supported);
  // csd write/read stay (staging happens either way); kernel and end-to-end
  // cannot exist without the accelerator.
  size_t csd_rows = 0;
  for (const auto& row : report.rows) {
    if (row.path == BenchPath::kCsd) {
      ++csd_rows;
      CHECK((row.phase == BenchPhase::kWrite || row.phase == BenchPhase::kRead));
    }
  }
  CHECK(csd_rows == 2);
  CHECK(report.rows.size() == 6);

  // No dim carries both end-to-end rows, so the reduction has nothing to say.
  try {
    report_latency_reduction(report.rows);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidConfig);
  }
}

TEST_CASE("live-software mode times the host kernel for the cpu rows") {
  Device dev(bench_config());
  Session session(dev);
  kernels::register_builtin_kernels(session);
  BenchPlan plan;
  plan.dims = {16};
  plan.transfer_reps = 3;
  plan.kernel_reps = 3;
  plan.mode = BenchMode::kLiveSoftware;
  auto report = run_bench(session, plan);

  const PhaseStats* cpu_kernel = nullptr;
  for (const auto& row : report.rows) {
    if (row.path == BenchPath::kCpu && row.phase == BenchPhase::kKernel) {
      cpu_kernel = &row;
    }
  }
  REQUIRE(cpu_kernel != nullptr);
  CHECK(cpu_kernel->min_ns >= 1);
  CHECK(cpu_kernel->mean_ns >= 1.0);
  // Wall-clock samples for a 16x16 matmul sit far under the 50 ms the
  // simulated anchor table would charge at this dim.
  CHECK(cpu_kernel->max_ns < 10'000'000);
  REQUIRE(report.dims.size() == 1);
  CHECK(report.dims[0].outputs_match);
}

TEST_CASE("the reduction report selects the strongest dim and needs both paths") {
  auto row = [](u32 dim, BenchPath path, BenchPhase phase, double mean) {
    PhaseStats s;
    s.dim = dim;
    s.bytes = static_cast<u64>(dim) * dim * 4;
    s.path = path;
    s.phase = phase;
    s.reps = 1;
    s.mean_ns = mean;
    s.min_ns = static_cast<u64>(mean);
    s.max_ns = static_cast<u64>(mean);
    return s;
  };
  std::vector<PhaseStats> rows = {
      row(384, BenchPath::kCsd, BenchPhase::kEndToEnd, 300.0),
      row(384, BenchPath::kCpu, BenchPhase::kEndToEnd, 1000.0),
      row(1536, BenchPath::kCsd, BenchPhase::kEndToEnd, 750.0),
      row(1536, BenchPath::kCpu, BenchPhase::kEndToEnd, 1000.0),
      row(2048, BenchPath::kCpu, BenchPhase::kEndToEnd, 1000.0),  // csd missing
  };
  auto report = report_latency_reduction(rows);
  REQUIRE(report.per_dim.size() == 2);
  CHECK(report.per_dim[0].dim == 384);
  CHECK(report.per_dim[0].pct == doctest::Approx(70.0));
  CHECK(report.per_dim[1].pct == doctest::Approx(25.0));
  CHECK(report.best_dim == 384);
  CHECK(report.best_pct == doctest::Approx(70.0));

  std::vector<PhaseStats> lonely = {
      row(64, BenchPath::kCpu, BenchPhase::kEndToEnd, 10.0)};
  CHECK_THROWS_AS(report_latency_reduction(lonely), Error);
}

TEST_SUITE_END();
