// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "csd/api/session.hpp"
#include "csd/types.hpp"

namespace csd::bench {

enum class BenchMode {
  kSimulated,     // every duration comes from the device timing model
  kLiveSoftware,  // software-kernel phases are wall-clock runs of the host matmul
};

struct BenchPlan {
  std::vector<u32> dims = {384, 1024, 1536};
  u32 transfer_reps = 2000;  // repetitions for the read/write phases
  u32 kernel_reps = 50;      // repetitions for kernel and end-to-end phases
  BenchMode mode = BenchMode::kSimulated;
  u64 seed = 1;

  void validate() const;  // dims positive, reps >= 1
};

// csd: inputs staged to flash, loaded into accelerator DRAM over p2p,
// on-device kernel, result stored over p2p and read back. cpu: same staging,
// but data returns to the host, the host computes, and the result is written
// back.
enum class BenchPath { kCsd, kCpu };
enum class BenchPhase { kWrite, kRead, kKernel, kEndToEnd };

const char* path_name(BenchPath path);
const char* phase_name(BenchPhase phase);

// One CSV row: statistics over reps for a (dim, path, phase) cell.
struct PhaseStats {
  u32 dim = 0;
  u64 bytes = 0;  // payload size of one input matrix at this dim
  BenchPath path = BenchPath::kCsd;
  BenchPhase phase = BenchPhase::kWrite;
  u32 reps = 0;
  double mean_ns = 0.0;
  u64 min_ns = 0;
  u64 max_ns = 0;
  double stddev_ns = 0.0;  // population stddev over reps
};

struct DimSummary {
  u32 dim = 0;
  u64 bytes = 0;
  bool hw_supported = true;
  bool outputs_match = false;    // csd and cpu result matrices bit-identical
  double kernel_speedup = 0.0;   // sw kernel mean / hw kernel mean
  double latency_reduction_pct = 0.0;
  double transfer_share_pct = 0.0;  // transfer time share of end-to-end, both paths pooled
};

struct BenchReport {
  BenchPlan plan;
  std::vector<PhaseStats> rows;
  std::vector<DimSummary> dims;
};

// Runs the dual-path protocol on the session's device. Per dim: generate two
// random input matrices, run each path once for real (cross-checking the
// outputs bit for bit), then gather statistics from timing-replayed
// repetitions so rep counts in the thousands stay cheap. Dims the hardware
// cannot synthesize keep their cpu rows; csd kernel/end-to-end rows are
// dropped and the summary says why.
BenchReport run_bench(api::Session& session, const BenchPlan& plan);

// CSV with fixed columns dim,bytes,path,phase,reps,mean_ns,min_ns,max_ns,
// stddev_ns. Deterministic formatting: a fixed seed in simulated mode yields
// byte-identical files.
void write_csv(std::ostream& out, const std::vector<PhaseStats>& rows);
std::string csv_string(const std::vector<PhaseStats>& rows);
std::vector<PhaseStats> parse_csv(std::istream& in, const std::string& origin);
std::vector<PhaseStats> load_csv(const std::string& path);

struct LatencyReduction {
  u32 dim = 0;
  double pct = 0.0;  // 100 * (1 - csd_end_to_end / cpu_end_to_end)
};

struct ReductionReport {
  std::vector<LatencyReduction> per_dim;
  u32 best_dim = 0;
  double best_pct = 0.0;  // the headline number
};

// Throws InvalidConfig unless at least one dim carries end-to-end rows for
// both paths.
ReductionReport report_latency_reduction(const std::vector<PhaseStats>& rows);

// Human-readable summary printed by the CLI after a run.
void write_summary(std::ostream& out, const BenchReport& report);

}  // namespace csd::bench
