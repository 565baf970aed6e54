// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "csd/error.hpp"
#include "csd/types.hpp"

namespace csd::api {

enum class CommandKind {
  kLoadFromFlash,
  kStoreToFlash,
  kHostWrite,
  kHostRead,
  kBufferUpload,
  kBufferDownload,
  kKernelLaunch,
  kTransferReplay,
  kKernelReplay,
};

const char* command_kind_name(CommandKind kind);

// Profiling record attached to every command. The queue is serialized and
// synchronous, so submit and start coincide. Commands that fail mid-flight
// (an interceptor verdict, say) still leave a record with `failure` set; the
// caller additionally sees the thrown Error.
struct CompletionEvent {
  CommandKind kind = CommandKind::kLoadFromFlash;
  u64 submit_ns = 0;
  u64 start_ns = 0;
  u64 end_ns = 0;
  std::optional<ErrorCode> failure;

  bool ok() const { return !failure.has_value(); }
  u64 elapsed_ns() const { return end_ns - start_ns; }
};

// Host-style latency measurement: wall span from a's call to b's return.
inline u64 elapsed_between(const CompletionEvent& a, const CompletionEvent& b) {
  if (b.end_ns < a.start_ns) {
    throw_error(ErrorCode::kNegativeInterval, "second event precedes first");
  }
  return b.end_ns - a.start_ns;
}

}  // namespace csd::api
