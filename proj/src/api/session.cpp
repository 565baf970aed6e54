// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/api/session.hpp"

#include <algorithm>

namespace csd::api {

using device::Device;
using device::HookStage;
using device::Locus;
using device::PathKind;

const char* command_kind_name(CommandKind kind) {
  switch (kind) {
    case CommandKind::kLoadFromFlash: return "load_from_flash";
    case CommandKind::kStoreToFlash: return "store_to_flash";
    case CommandKind::kHostWrite: return "host_write";
    case CommandKind::kHostRead: return "host_read";
    case CommandKind::kBufferUpload: return "buffer_upload";
    case CommandKind::kBufferDownload: return "buffer_download";
    case CommandKind::kKernelLaunch: return "kernel_launch";
    case CommandKind::kTransferReplay: return "transfer_replay";
    case CommandKind::kKernelReplay: return "kernel_replay";
  }
  return "unknown";
}

Session::BufferState& Session::live_buffer(u64 id) {
  auto it = buffers_.find(id);
  if (it == buffers_.end()) {
    throw_error(ErrorCode::kUseAfterFree, "buffer " + std::to_string(id) + " is not live");
  }
  return it->second;
}

const Session::BufferState& Session::live_buffer(u64 id) const {
  auto it = buffers_.find(id);
  if (it == buffers_.end()) {
    throw_error(ErrorCode::kUseAfterFree, "buffer " + std::to_string(id) + " is not live");
  }
  return it->second;
}

CompletionEvent Session::log_event(CommandKind kind, const Device::IoTiming& t) {
  CompletionEvent ev{kind, t.submit_ns, t.start_ns, t.end_ns, std::nullopt};
  events_.push_back(ev);
  return ev;
}

DeviceBuffer Session::alloc_device_buffer(u64 size, bool p2p_mapped) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (size == 0) {
    throw_error(ErrorCode::kInvalidConfig, "zero-size buffer");
  }
  auto offset = dev_.dram().allocate(size);
  if (!offset) {
    throw_error(ErrorCode::kOutOfDeviceMemory,
                "no free region of " + std::to_string(size) + " bytes");
  }
  DeviceBuffer buf{next_buffer_id_++, size, *offset, p2p_mapped};
  buffers_.emplace(buf.id, BufferState{buf, std::vector<std::byte>(size)});
  return buf;
}

void Session::free_device_buffer(u64 buffer_id) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = buffers_.find(buffer_id);
  if (it == buffers_.end()) {
    throw_error(ErrorCode::kUseAfterFree,
                "buffer " + std::to_string(buffer_id) + " is not live");
  }
  dev_.dram().release(it->second.info.offset, it->second.info.size);
  buffers_.erase(it);
}

const std::vector<std::byte>& Session::buffer_contents(u64 buffer_id) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return live_buffer(buffer_id).bytes;
}

CompletionEvent Session::upload_to_buffer(u64 buffer_id, std::span<const std::byte> data) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  BufferState& buf = live_buffer(buffer_id);
  if (data.size() > buf.info.size) {
    throw_error(ErrorCode::kDestinationTooSmall,
                "buffer " + std::to_string(buffer_id) + " holds " +
                    std::to_string(buf.info.size) + " bytes, got " +
                    std::to_string(data.size()));
  }
  auto t = dev_.bill_transfer(data.size(), PathKind::kHostMediated, Locus::kHost);
  std::copy(data.begin(), data.end(), buf.bytes.begin());
  return log_event(CommandKind::kBufferUpload, t);
}

std::pair<std::vector<std::byte>, CompletionEvent> Session::download_from_buffer(u64 buffer_id) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  BufferState& buf = live_buffer(buffer_id);
  auto t = dev_.bill_transfer(buf.info.size, PathKind::kHostMediated, Locus::kHost);
  return {buf.bytes, log_event(CommandKind::kBufferDownload, t)};
}

CompletionEvent Session::load_from_flash(u64 lba, u64 count, u64 dest_buffer_id,
                                         PathKind path, u64 dest_offset) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  BufferState& dest = live_buffer(dest_buffer_id);
  u64 bytes = count * static_cast<u64>(dev_.block_size());
  if (dest.info.size < dest_offset || dest.info.size - dest_offset < bytes) {
    throw_error(ErrorCode::kDestinationTooSmall,
                "buffer " + std::to_string(dest_buffer_id) + " holds " +
                    std::to_string(dest.info.size) + " bytes, need " +
                    std::to_string(bytes) + " at offset " + std::to_string(dest_offset));
  }
  if (path == PathKind::kPeerToPeer && !dest.info.p2p_mapped) {
    throw_error(ErrorCode::kPathNotPermitted,
                "peer-to-peer load needs a p2p-mapped buffer");
  }
  try {
    auto [data, t] = dev_.read_blocks(lba, count, path, Locus::kDevice);
    std::copy(data.begin(), data.end(), dest.bytes.begin() + dest_offset);
    return log_event(CommandKind::kLoadFromFlash, t);
  } catch (const Error& e) {
    CompletionEvent ev{CommandKind::kLoadFromFlash, dev_.now_ns(), dev_.now_ns(),
                       dev_.now_ns(), e.code()};
    events_.push_back(ev);
    throw;
  }
}

CompletionEvent Session::store_to_flash(u64 src_buffer_id, u64 lba, u64 count,
                                        PathKind path, u64 src_offset) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  BufferState& src = live_buffer(src_buffer_id);
  u64 bytes = count * static_cast<u64>(dev_.block_size());
  if (src.info.size < src_offset || src.info.size - src_offset < bytes) {
    throw_error(ErrorCode::kBufferShapeMismatch,
                "buffer " + std::to_string(src_buffer_id) + " holds " +
                    std::to_string(src.info.size) + " bytes, need " +
                    std::to_string(bytes) + " at offset " + std::to_string(src_offset));
  }
  if (path == PathKind::kPeerToPeer && !src.info.p2p_mapped) {
    throw_error(ErrorCode::kPathNotPermitted,
                "peer-to-peer store needs a p2p-mapped buffer");
  }
  try {
    auto t = dev_.write_blocks(lba, count,
                               std::span<const std::byte>(src.bytes.data() + src_offset,
                                                          bytes),
                               path, Locus::kDevice);
    return log_event(CommandKind::kStoreToFlash, t);
  } catch (const Error& e) {
    CompletionEvent ev{CommandKind::kStoreToFlash, dev_.now_ns(), dev_.now_ns(),
                       dev_.now_ns(), e.code()};
    events_.push_back(ev);
    throw;
  }
}

CompletionEvent Session::write_from_host(u64 lba, u64 count,
                                         std::span<const std::byte> data) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  try {
    auto t = dev_.write_blocks(lba, count, data, PathKind::kHostMediated, Locus::kHost);
    return log_event(CommandKind::kHostWrite, t);
  } catch (const Error& e) {
    CompletionEvent ev{CommandKind::kHostWrite, dev_.now_ns(), dev_.now_ns(), dev_.now_ns(),
                       e.code()};
    events_.push_back(ev);
    throw;
  }
}

std::pair<std::vector<std::byte>, CompletionEvent> Session::read_to_host(u64 lba, u64 count) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  try {
    auto [data, t] = dev_.read_blocks(lba, count, PathKind::kHostMediated, Locus::kHost);
    return {std::move(data), log_event(CommandKind::kHostRead, t)};
  } catch (const Error& e) {
    CompletionEvent ev{CommandKind::kHostRead, dev_.now_ns(), dev_.now_ns(), dev_.now_ns(),
                       e.code()};
    events_.push_back(ev);
    throw;
  }
}

void Session::register_kernel(const std::string& kernel_id, Kernel kernel) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  kernels_[kernel_id] = std::move(kernel);
}

CompletionEvent Session::launch_kernel(const std::string& kernel_id, const KernelConfig& cfg,
                                       const std::vector<u64>& input_ids, u64 output_id,
                                       const std::vector<u32>& dims) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = kernels_.find(kernel_id);
  if (it == kernels_.end()) {
    throw_error(ErrorCode::kUnknownKernel, "no kernel '" + kernel_id + "'");
  }
  if (!cfg.valid()) {
    throw_error(ErrorCode::kInvalidConfig, "kernel config rejected");
  }
  std::vector<u64> input_sizes;
  std::vector<std::span<const std::byte>> inputs;
  for (u64 id : input_ids) {
    BufferState& buf = live_buffer(id);
    input_sizes.push_back(buf.info.size);
    inputs.emplace_back(buf.bytes.data(), buf.bytes.size());
  }
  BufferState& out = live_buffer(output_id);
  u32 n = it->second.shape(input_sizes, out.info.size, dims);
  // Billing first: an unsupported size rejects the launch before compute.
  auto t = dev_.bill_kernel(n, device::KernelMode::kHardware, cfg);
  it->second.run(inputs, std::span<std::byte>(out.bytes.data(), out.bytes.size()), dims);
  return log_event(CommandKind::kKernelLaunch, t);
}

InterceptorRegistration Session::register_interceptor(int priority,
                                                      device::PreWriteHook hook) {
  u64 id = dev_.add_hook(HookStage::kPreWrite, priority, std::move(hook));
  return {id, HookStage::kPreWrite, priority};
}

InterceptorRegistration Session::register_interceptor(int priority,
                                                      device::PostReadHook hook) {
  u64 id = dev_.add_hook(HookStage::kPostRead, priority, std::move(hook));
  return {id, HookStage::kPostRead, priority};
}

void Session::unregister_interceptor(u64 hook_id) { dev_.remove_hook(hook_id); }

CompletionEvent Session::replay_transfer(u64 bytes, PathKind path, Locus other_end) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto t = dev_.bill_transfer(bytes, path, other_end);
  return log_event(CommandKind::kTransferReplay, t);
}

CompletionEvent Session::replay_kernel(u32 n, device::KernelMode mode,
                                       const KernelConfig& cfg) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto t = dev_.bill_kernel(n, mode, cfg);
  return log_event(CommandKind::kKernelReplay, t);
}

}  // namespace csd::api
