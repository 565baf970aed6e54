// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "csd/device/timing.hpp"
#include "csd/error.hpp"
#include "csd/types.hpp"

namespace csd::device {

class Device;

// One block of an in-flight write, presented to pre-write interceptors
// before the store mutates. Payload edits by a mutate verdict land as-is.
struct WriteRequest {
  u64 lba;
  std::vector<std::byte>& payload;
  bool overwrites_live;  // an earlier write to this LBA is still current
  u64 live_epoch;        // epoch of that earlier write, 0 otherwise
  u64 now_ns;
  PathKind path;
};

// One block of a completed read, presented to post-read interceptors before
// data leaves the device.
struct ReadResponse {
  u64 lba;
  std::vector<std::byte>& payload;
  bool was_live;
  u64 now_ns;
  PathKind path;
};

struct WriteVerdict {
  enum class Kind { kPass, kMutate, kDrop, kFail };
  Kind kind = Kind::kPass;
  ErrorCode error = ErrorCode::kReadFault;
  int detail = 0;  // auxiliary value carried into the thrown Error

  static WriteVerdict pass() { return {}; }
  static WriteVerdict mutate() { return {Kind::kMutate, ErrorCode::kReadFault, 0}; }
  static WriteVerdict drop() { return {Kind::kDrop, ErrorCode::kReadFault, 0}; }
  static WriteVerdict fail(ErrorCode code, int detail = 0) {
    return {Kind::kFail, code, detail};
  }
};

struct ReadVerdict {
  enum class Kind { kPass, kMutate, kFail };
  Kind kind = Kind::kPass;
  ErrorCode error = ErrorCode::kReadFault;
  int detail = 0;

  static ReadVerdict pass() { return {}; }
  static ReadVerdict mutate() { return {Kind::kMutate, ErrorCode::kReadFault, 0}; }
  static ReadVerdict fail(ErrorCode code, int detail = 0) {
    return {Kind::kFail, code, detail};
  }
};

// Device services available to an interceptor while it runs. Hooks execute
// inside the command they intercept, so billed work extends that command's
// completion time.
class DeviceContext {
 public:
  u64 now_ns() const;
  u32 block_size() const;

  // Current stored content of a block, zeros if unwritten. Unbilled.
  std::vector<std::byte> peek_block(u64 lba) const;
  bool lba_live(u64 lba) const;
  u64 lba_epoch(u64 lba) const;
  u64 lba_written_at(u64 lba) const;

  // Bills an intra-device move (shadow copies and the like) against the
  // enclosing command; returns the nominal elapsed time charged.
  u64 bill_intra_transfer(u64 bytes);

  // Stretches the enclosing command by a fixed latency.
  void add_delay(u64 ns);

 private:
  friend class Device;
  explicit DeviceContext(Device& dev) : dev_(dev) {}
  Device& dev_;
};

enum class HookStage { kPreWrite, kPostRead };

using PreWriteHook = std::function<WriteVerdict(WriteRequest&, DeviceContext&)>;
using PostReadHook = std::function<ReadVerdict(ReadResponse&, DeviceContext&)>;

}  // namespace csd::device
