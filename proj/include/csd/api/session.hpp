// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "csd/api/events.hpp"
#include "csd/device/device.hpp"
#include "csd/kernel_config.hpp"

namespace csd::api {

struct DeviceBuffer {
  u64 id = 0;
  u64 size = 0;
  u64 offset = 0;  // DRAM placement
  bool p2p_mapped = false;
};

struct InterceptorRegistration {
  u64 hook_id = 0;
  device::HookStage stage = device::HookStage::kPreWrite;
  int priority = 0;
};

// A registered computation. `shape` validates buffer sizes against dims and
// yields the equivalent square dimension the timing model bills; `run`
// produces the functional result. Splitting the two lets a launch reject an
// unsupported size before any compute happens.
struct Kernel {
  std::function<u32(const std::vector<u64>& input_sizes, u64 output_size,
                    const std::vector<u32>& dims)>
      shape;
  std::function<void(const std::vector<std::span<const std::byte>>& inputs,
                     std::span<std::byte> output, const std::vector<u32>& dims)>
      run;
};

// Library handle over one device: buffer lifecycle, flash I/O on either
// path, kernel launches, interceptor registration. Every command appends a
// CompletionEvent to the session log.
class Session {
 public:
  explicit Session(device::Device& dev) : dev_(dev) {}

  device::Device& device() { return dev_; }

  // --- buffers ---
  DeviceBuffer alloc_device_buffer(u64 size, bool p2p_mapped);
  void free_device_buffer(u64 buffer_id);
  const std::vector<std::byte>& buffer_contents(u64 buffer_id) const;  // unbilled inspection

  // Host <-> device-DRAM copies over the host-mediated link (one hop).
  CompletionEvent upload_to_buffer(u64 buffer_id, std::span<const std::byte> data);
  std::pair<std::vector<std::byte>, CompletionEvent> download_from_buffer(u64 buffer_id);

  // --- flash I/O ---
  // dest_offset/src_offset address within the buffer, letting one buffer
  // gather blocks from scattered extents.
  CompletionEvent load_from_flash(u64 lba, u64 count, u64 dest_buffer_id,
                                  device::PathKind path, u64 dest_offset = 0);
  CompletionEvent store_to_flash(u64 src_buffer_id, u64 lba, u64 count,
                                 device::PathKind path, u64 src_offset = 0);
  CompletionEvent write_from_host(u64 lba, u64 count, std::span<const std::byte> data);
  std::pair<std::vector<std::byte>, CompletionEvent> read_to_host(u64 lba, u64 count);

  // --- kernels ---
  void register_kernel(const std::string& kernel_id, Kernel kernel);
  CompletionEvent launch_kernel(const std::string& kernel_id, const KernelConfig& cfg,
                                const std::vector<u64>& input_ids, u64 output_id,
                                const std::vector<u32>& dims = {});

  // --- interception ---
  InterceptorRegistration register_interceptor(int priority, device::PreWriteHook hook);
  InterceptorRegistration register_interceptor(int priority, device::PostReadHook hook);
  void unregister_interceptor(u64 hook_id);

  // --- timing-only replays (benchmark repetitions) ---
  CompletionEvent replay_transfer(u64 bytes, device::PathKind path, device::Locus other_end);
  CompletionEvent replay_kernel(u32 n, device::KernelMode mode, const KernelConfig& cfg);

  const std::vector<CompletionEvent>& events() const { return events_; }

 private:
  struct BufferState {
    DeviceBuffer info;
    std::vector<std::byte> bytes;
  };

  BufferState& live_buffer(u64 id);
  const BufferState& live_buffer(u64 id) const;
  CompletionEvent log_event(CommandKind kind, const device::Device::IoTiming& t);

  device::Device& dev_;
  std::map<u64, BufferState> buffers_;
  u64 next_buffer_id_ = 1;
  std::map<std::string, Kernel> kernels_;
  std::vector<CompletionEvent> events_;
  mutable std::recursive_mutex mu_;
};

}  // namespace csd::api
