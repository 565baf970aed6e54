// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "csd/error.hpp"
#include "csd/kernels/matmul.hpp"
#include "csd/kernels/registry.hpp"
#include "csd/util/rng.hpp"

namespace csd::bench {

namespace {

using device::Locus;
using device::PathKind;

struct Stats {
  double mean = 0.0;
  u64 min = 0;
  u64 max = 0;
  double stddev = 0.0;
};

Stats stats_of(const std::vector<u64>& samples) {
  Stats s;
  if (samples.empty()) return s;
  long double sum = 0.0L;
  s.min = samples[0];
  s.max = samples[0];
  for (u64 v : samples) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = static_cast<double>(sum / samples.size());
  long double var = 0.0L;
  for (u64 v : samples) {
    long double d = static_cast<long double>(v) - s.mean;
    var += d * d;
  }
  s.stddev = static_cast<double>(std::sqrt(var / samples.size()));
  return s;
}

PhaseStats make_row(u32 dim, u64 bytes, BenchPath path, BenchPhase phase,
                    const std::vector<u64>& samples) {
  Stats s = stats_of(samples);
  PhaseStats row;
  row.dim = dim;
  row.bytes = bytes;
  row.path = path;
  row.phase = phase;
  row.reps = static_cast<u32>(samples.size());
  row.mean_ns = s.mean;
  row.min_ns = s.min;
  row.max_ns = s.max;
  row.stddev_ns = s.stddev;
  return row;
}

std::vector<std::byte> padded_bytes(const kernels::MatrixU32& m, u64 padded_size) {
  auto bytes = kernels::to_bytes(m);
  bytes.resize(padded_size);
  return bytes;
}

// Wall-clock single run of the host matmul, in ns.
u64 timed_host_matmul(const kernels::MatrixU32& a, const kernels::MatrixU32& b) {
  auto t0 = std::chrono::steady_clock::now();
  volatile u32 sink = kernels::reference::matmul_u32(a, b).elements.back();
  (void)sink;
  auto t1 = std::chrono::steady_clock::now();
  auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  return ns > 0 ? static_cast<u64>(ns) : 1;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

const char* kCsvHeader = "dim,bytes,path,phase,reps,mean_ns,min_ns,max_ns,stddev_ns";

[[noreturn]] void csv_fail(const std::string& origin, size_t line, const std::string& what) {
  throw_error(ErrorCode::kParseError, origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

const char* path_name(BenchPath path) {
  return path == BenchPath::kCsd ? "csd" : "cpu";
}

const char* phase_name(BenchPhase phase) {
  switch (phase) {
    case BenchPhase::kWrite: return "write";
    case BenchPhase::kRead: return "read";
    case BenchPhase::kKernel: return "kernel";
    case BenchPhase::kEndToEnd: return "end_to_end";
  }
  return "?";
}

void BenchPlan::validate() const {
  if (dims.empty()) throw_error(ErrorCode::kInvalidConfig, "no matrix dims to run");
  for (u32 d : dims) {
    if (d == 0) throw_error(ErrorCode::kInvalidConfig, "matrix dims must be positive");
  }
  if (transfer_reps == 0 || kernel_reps == 0) {
    throw_error(ErrorCode::kInvalidConfig, "repetition counts must be >= 1");
  }
}

BenchReport run_bench(api::Session& session, const BenchPlan& plan) {
  plan.validate();
  device::Device& dev = session.device();
  const u32 bs = dev.block_size();
  const KernelConfig kcfg{};
  kernels::register_builtin_kernels(session);

  BenchReport report;
  report.plan = plan;

  for (u32 dim : plan.dims) {
    const u64 bytes = static_cast<u64>(dim) * dim * sizeof(u32);
    const u64 nb = (bytes + bs - 1) / bs;  // blocks per staged matrix
    const u64 padded = nb * bs;
    const u64 lba_a = 0, lba_b = nb, lba_c_csd = 2 * nb, lba_c_cpu = 3 * nb;

    auto a = kernels::MatrixU32::random(dim, util::derive_seed(plan.seed, 2ull * dim));
    auto b = kernels::MatrixU32::random(dim, util::derive_seed(plan.seed, 2ull * dim + 1));

    // One real pass per path; repetition statistics come from timing replays
    // afterwards so large rep counts do not recopy gigabytes.
    session.write_from_host(lba_a, nb, padded_bytes(a, padded));
    session.write_from_host(lba_b, nb, padded_bytes(b, padded));

    bool hw_supported = true;
    auto buf_a = session.alloc_device_buffer(padded, true);
    auto buf_b = session.alloc_device_buffer(padded, true);
    auto buf_c = session.alloc_device_buffer(padded, true);
    session.load_from_flash(lba_a, nb, buf_a.id, PathKind::kPeerToPeer);
    session.load_from_flash(lba_b, nb, buf_b.id, PathKind::kPeerToPeer);
    try {
      session.launch_kernel("matmul_u32", kcfg, {buf_a.id, buf_b.id}, buf_c.id, {dim});
      session.store_to_flash(buf_c.id, lba_c_csd, nb, PathKind::kPeerToPeer);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnsupportedSize) throw;
      hw_supported = false;
    }
    session.free_device_buffer(buf_a.id);
    session.free_device_buffer(buf_b.id);
    session.free_device_buffer(buf_c.id);

    auto [a_back, ev_a] = session.read_to_host(lba_a, nb);
    auto [b_back, ev_b] = session.read_to_host(lba_b, nb);
    auto a_host = kernels::u32_from_bytes(std::span(a_back).subspan(0, bytes), dim);
    auto b_host = kernels::u32_from_bytes(std::span(b_back).subspan(0, bytes), dim);
    auto c_host = kernels::reference::matmul_u32(a_host, b_host);
    session.write_from_host(lba_c_cpu, nb, padded_bytes(c_host, padded));

    bool outputs_match = false;
    if (hw_supported) {
      auto [c_csd_bytes, ev_c1] = session.read_to_host(lba_c_csd, nb);
      auto [c_cpu_bytes, ev_c2] = session.read_to_host(lba_c_cpu, nb);
      outputs_match = c_csd_bytes == c_cpu_bytes;
    }

    // Host matmul wall-clock samples, shared between the kernel row and the
    // end-to-end reps in live mode.
    std::vector<u64> live_sw;
    if (plan.mode == BenchMode::kLiveSoftware) {
      live_sw.reserve(plan.kernel_reps);
      for (u32 r = 0; r < plan.kernel_reps; ++r) live_sw.push_back(timed_host_matmul(a, b));
    }

    auto transfer = [&](PathKind path, Locus end) {
      return session.replay_transfer(padded, path, end).elapsed_ns();
    };
    auto collect_transfers = [&](PathKind path, Locus end) {
      std::vector<u64> s;
      s.reserve(plan.transfer_reps);
      for (u32 r = 0; r < plan.transfer_reps; ++r) s.push_back(transfer(path, end));
      return s;
    };

    // csd rows
    auto csd_w = collect_transfers(PathKind::kHostMediated, Locus::kHost);
    auto csd_r = collect_transfers(PathKind::kPeerToPeer, Locus::kDevice);
    report.rows.push_back(make_row(dim, bytes, BenchPath::kCsd, BenchPhase::kWrite, csd_w));
    report.rows.push_back(make_row(dim, bytes, BenchPath::kCsd, BenchPhase::kRead, csd_r));
    std::vector<u64> hw_kernel, csd_e2e;
    if (hw_supported) {
      hw_kernel.reserve(plan.kernel_reps);
      csd_e2e.reserve(plan.kernel_reps);
      for (u32 r = 0; r < plan.kernel_reps; ++r) {
        hw_kernel.push_back(
            session.replay_kernel(dim, device::KernelMode::kHardware, kcfg).elapsed_ns());
      }
      for (u32 r = 0; r < plan.kernel_reps; ++r) {
        u64 total = 0;
        total += transfer(PathKind::kHostMediated, Locus::kHost);
        total += transfer(PathKind::kHostMediated, Locus::kHost);
        total += transfer(PathKind::kPeerToPeer, Locus::kDevice);
        total += transfer(PathKind::kPeerToPeer, Locus::kDevice);
        total += session.replay_kernel(dim, device::KernelMode::kHardware, kcfg).elapsed_ns();
        total += transfer(PathKind::kPeerToPeer, Locus::kDevice);
        total += transfer(PathKind::kHostMediated, Locus::kHost);
        csd_e2e.push_back(total);
      }
      report.rows.push_back(make_row(dim, bytes, BenchPath::kCsd, BenchPhase::kKernel, hw_kernel));
      report.rows.push_back(
          make_row(dim, bytes, BenchPath::kCsd, BenchPhase::kEndToEnd, csd_e2e));
    }

    // cpu rows
    auto cpu_w = collect_transfers(PathKind::kHostMediated, Locus::kHost);
    auto cpu_r = collect_transfers(PathKind::kHostMediated, Locus::kHost);
    std::vector<u64> sw_kernel;
    sw_kernel.reserve(plan.kernel_reps);
    for (u32 r = 0; r < plan.kernel_reps; ++r) {
      if (plan.mode == BenchMode::kLiveSoftware) {
        sw_kernel.push_back(live_sw[r]);
      } else {
        sw_kernel.push_back(
            session.replay_kernel(dim, device::KernelMode::kSoftware, kcfg).elapsed_ns());
      }
    }
    std::vector<u64> cpu_e2e;
    cpu_e2e.reserve(plan.kernel_reps);
    for (u32 r = 0; r < plan.kernel_reps; ++r) {
      u64 total = 0;
      total += transfer(PathKind::kHostMediated, Locus::kHost);
      total += transfer(PathKind::kHostMediated, Locus::kHost);
      total += transfer(PathKind::kHostMediated, Locus::kHost);
      total += transfer(PathKind::kHostMediated, Locus::kHost);
      if (plan.mode == BenchMode::kLiveSoftware) {
        total += live_sw[r];
      } else {
        total += session.replay_kernel(dim, device::KernelMode::kSoftware, kcfg).elapsed_ns();
      }
      total += transfer(PathKind::kHostMediated, Locus::kHost);
      cpu_e2e.push_back(total);
    }
    report.rows.push_back(make_row(dim, bytes, BenchPath::kCpu, BenchPhase::kWrite, cpu_w));
    report.rows.push_back(make_row(dim, bytes, BenchPath::kCpu, BenchPhase::kRead, cpu_r));
    report.rows.push_back(make_row(dim, bytes, BenchPath::kCpu, BenchPhase::kKernel, sw_kernel));
    report.rows.push_back(make_row(dim, bytes, BenchPath::kCpu, BenchPhase::kEndToEnd, cpu_e2e));

    DimSummary summary;
    summary.dim = dim;
    summary.bytes = bytes;
    summary.hw_supported = hw_supported;
    summary.outputs_match = outputs_match;
    // Share of end-to-end spent moving data, from nominal (jitter-free)
    // costs, pooled over both paths.
    u64 host_hop = dev.transfer_time_ns(padded, PathKind::kHostMediated);
    u64 p2p_hop = dev.transfer_time_ns(padded, PathKind::kPeerToPeer);
    double sw_ns = stats_of(sw_kernel).mean;
    double cpu_transfers = 5.0 * static_cast<double>(host_hop);
    if (hw_supported) {
      double hw_ns = static_cast<double>(dev.kernel_time_ns(dim, device::KernelMode::kHardware, kcfg));
      double csd_transfers = 3.0 * static_cast<double>(host_hop) + 3.0 * static_cast<double>(p2p_hop);
      summary.kernel_speedup = hw_ns > 0 ? sw_ns / hw_ns : 0.0;
      double csd_total = stats_of(csd_e2e).mean;
      double cpu_total = stats_of(cpu_e2e).mean;
      summary.latency_reduction_pct = cpu_total > 0 ? 100.0 * (1.0 - csd_total / cpu_total) : 0.0;
      summary.transfer_share_pct = 100.0 * (csd_transfers + cpu_transfers) /
                                   (csd_transfers + hw_ns + cpu_transfers + sw_ns);
    } else {
      summary.transfer_share_pct = 100.0 * cpu_transfers / (cpu_transfers + sw_ns);
    }
    report.dims.push_back(summary);
  }
  return report;
}

void write_csv(std::ostream& out, const std::vector<PhaseStats>& rows) {
  out << kCsvHeader << '\n';
  for (const PhaseStats& r : rows) {
    out << r.dim << ',' << r.bytes << ',' << path_name(r.path) << ',' << phase_name(r.phase)
        << ',' << r.reps << ',' << format_double(r.mean_ns) << ',' << r.min_ns << ','
        << r.max_ns << ',' << format_double(r.stddev_ns) << '\n';
  }
}

std::string csv_string(const std::vector<PhaseStats>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

std::vector<PhaseStats> parse_csv(std::istream& in, const std::string& origin) {
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) csv_fail(origin, 1, "empty file");
  ++line_no;
  if (line != kCsvHeader) csv_fail(origin, line_no, "unexpected header");

  std::vector<PhaseStats> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream fs(line);
    while (std::getline(fs, field, ',')) fields.push_back(field);
    if (fields.size() != 9) csv_fail(origin, line_no, "expected 9 fields");
    PhaseStats r;
    try {
      r.dim = static_cast<u32>(std::stoul(fields[0]));
      r.bytes = std::stoull(fields[1]);
      r.reps = static_cast<u32>(std::stoul(fields[4]));
      r.mean_ns = std::stod(fields[5]);
      r.min_ns = std::stoull(fields[6]);
      r.max_ns = std::stoull(fields[7]);
      r.stddev_ns = std::stod(fields[8]);
    } catch (const std::exception&) {
      csv_fail(origin, line_no, "malformed numeric field");
    }
    if (fields[2] == "csd") {
      r.path = BenchPath::kCsd;
    } else if (fields[2] == "cpu") {
      r.path = BenchPath::kCpu;
    } else {
      csv_fail(origin, line_no, "unknown path '" + fields[2] + "'");
    }
    if (fields[3] == "write") {
      r.phase = BenchPhase::kWrite;
    } else if (fields[3] == "read") {
      r.phase = BenchPhase::kRead;
    } else if (fields[3] == "kernel") {
      r.phase = BenchPhase::kKernel;
    } else if (fields[3] == "end_to_end") {
      r.phase = BenchPhase::kEndToEnd;
    } else {
      csv_fail(origin, line_no, "unknown phase '" + fields[3] + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<PhaseStats> load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kParseError, path + ": cannot open CSV");
  return parse_csv(in, path);
}

ReductionReport report_latency_reduction(const std::vector<PhaseStats>& rows) {
  ReductionReport rep;
  std::vector<u32> dims;
  for (const PhaseStats& r : rows) {
    if (std::find(dims.begin(), dims.end(), r.dim) == dims.end()) dims.push_back(r.dim);
  }
  for (u32 dim : dims) {
    const PhaseStats* csd = nullptr;
    const PhaseStats* cpu = nullptr;
    for (const PhaseStats& r : rows) {
      if (r.dim != dim || r.phase != BenchPhase::kEndToEnd) continue;
      if (r.path == BenchPath::kCsd) csd = &r;
      if (r.path == BenchPath::kCpu) cpu = &r;
    }
    if (!csd || !cpu || cpu->mean_ns <= 0) continue;
    LatencyReduction lr;
    lr.dim = dim;
    lr.pct = 100.0 * (1.0 - csd->mean_ns / cpu->mean_ns);
    rep.per_dim.push_back(lr);
  }
  if (rep.per_dim.empty()) {
    throw_error(ErrorCode::kInvalidConfig, "no dim has end-to-end rows for both paths");
  }
  const auto* best = &rep.per_dim[0];
  for (const auto& lr : rep.per_dim) {
    if (lr.pct > best->pct) best = &lr;
  }
  rep.best_dim = best->dim;
  rep.best_pct = best->pct;
  return rep;
}

void write_summary(std::ostream& out, const BenchReport& report) {
  for (const DimSummary& d : report.dims) {
    if (!d.hw_supported) {
      out << "dim " << d.dim << " (" << d.bytes
          << " bytes): hardware kernel unsupported at this size; cpu rows only\n";
      continue;
    }
    out << "dim " << d.dim << " (" << d.bytes << " bytes): kernel speedup "
        << format_double(d.kernel_speedup) << "x, latency reduction "
        << format_double(d.latency_reduction_pct) << "%, transfer share "
        << format_double(d.transfer_share_pct) << "%, outputs "
        << (d.outputs_match ? "match" : "DIFFER") << '\n';
  }
  try {
    ReductionReport rr = report_latency_reduction(report.rows);
    out << "headline latency reduction: " << format_double(rr.best_pct) << "% at dim "
        << rr.best_dim << '\n';
  } catch (const Error&) {
    out << "headline latency reduction: unavailable (need both paths)\n";
  }
}

}  // namespace csd::bench
