// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csd/api/session.hpp"
#include "csd/types.hpp"

namespace csd::bench {

enum class TraceOp { kRead, kWrite };

// One replayable I/O. A write carries its payload either inline or as a
// digest from which deterministic bytes are synthesized at replay time;
// digest form keeps large traces diffable and small.
struct IoTraceRecord {
  u64 seq = 0;      // strictly increasing across a trace
  u64 time_ns = 0;  // capture-time stamp, informational on replay
  TraceOp op = TraceOp::kWrite;
  u64 lba = 0;
  u64 len_blocks = 1;
  std::optional<std::vector<u8>> payload;  // inline form
  std::optional<u64> payload_digest;       // synthesized form
};

// JSONL: one object per line, keys seq/time_ns/op/lba/len_blocks and for
// writes exactly one of payload_b64 or payload_digest. Parse errors carry
// origin:line. serialize_trace round-trips parse_trace exactly.
std::vector<IoTraceRecord> parse_trace(std::istream& in, const std::string& origin);
std::vector<IoTraceRecord> load_trace(const std::string& path);
void serialize_trace(std::ostream& out, const std::vector<IoTraceRecord>& records);
void save_trace(const std::string& path, const std::vector<IoTraceRecord>& records);

// Expands a write record to len_blocks * block_size bytes. Inline payloads
// must already have that exact length; digest payloads are synthesized from
// their own seed, so the same record always yields the same bytes.
std::vector<std::byte> materialize_payload(const IoTraceRecord& record, u32 block_size);

struct ReplayResult {
  u64 reads_ok = 0;
  u64 writes_ok = 0;
  u64 read_errors = 0;       // reads that surfaced a device error
  u64 write_rejections = 0;  // writes refused by the device or an interceptor
  std::string first_error;   // message of the earliest failure, if any
};

// Drives every record through the session's host-side I/O entry points.
// Per-record failures are counted, not fatal: injected faults and freeze
// rejections are expected outcomes of the workloads this replays.
// after_record, when set, runs after each record lands (error or not); use
// it to capture device timestamps at trace positions.
ReplayResult replay_trace(api::Session& session, const std::vector<IoTraceRecord>& records,
                          const std::function<void(const IoTraceRecord&)>& after_record = {});

// Synthetic workload builders. start_seq/start_time_ns let phases chain into
// one well-formed trace.
//
// Benign: sequential single-block writes of zero-filled payloads (fresh
// low-entropy content, no overwrite-after-read pattern).
std::vector<IoTraceRecord> make_benign_trace(u64 start_lba, u64 count, u32 block_size,
                                             u64 start_seq = 0, u64 start_time_ns = 0);

// Attack: for each block in [start_lba, start_lba + count), read it and
// immediately overwrite it with uniform-random bytes, the classic
// encrypt-in-place footprint.
std::vector<IoTraceRecord> make_attack_trace(u64 start_lba, u64 count, u64 seed,
                                             u64 start_seq = 0, u64 start_time_ns = 0);

// Mixed read/write churn over [start_lba, start_lba + lba_span), digest
// payloads; exercise traffic for fault-injection runs.
std::vector<IoTraceRecord> make_mixed_trace(u64 start_lba, u64 lba_span, u64 count,
                                            u64 seed, u64 start_seq = 0,
                                            u64 start_time_ns = 0);

}  // namespace csd::bench
