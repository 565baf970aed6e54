// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"

#include "csd/device/device.hpp"
#include "csd/util/rng.hpp"

using namespace csd;
using namespace csd::device;

namespace {

DeviceConfig small_config(double jitter = 0.0) {
  DeviceConfig cfg;
  cfg.block_size = 512;
  cfg.num_blocks = 256;
  cfg.timing.jitter_fraction = jitter;
  return cfg;
}

std::vector<std::byte> pattern_bytes(size_t size, u64 seed) {
  util::Rng rng(seed);
  std::vector<std::byte> out(size);
  for (auto& b : out) b = static_cast<std::byte>(rng.next_byte());
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("device");

TEST_CASE("fresh namespace reads back zeroes and reports no live blocks") {
  Device dev(small_config());
  CHECK(dev.num_live_blocks() == 0);
  CHECK_FALSE(dev.lba_live(3));
  auto [data, t] = dev.read_blocks(0, 4, PathKind::kHostMediated, Locus::kHost);
  CHECK(data.size() == 4 * 512);
  for (std::byte b : data) CHECK(b == std::byte{0});
}

TEST_CASE("write then read round trip over both paths") {
  Device dev(small_config());
  auto payload = pattern_bytes(3 * 512, 1);
  dev.write_blocks(10, 3, payload, PathKind::kHostMediated, Locus::kHost);
  CHECK(dev.num_live_blocks() == 3);

  auto [host_view, t1] = dev.read_blocks(10, 3, PathKind::kHostMediated, Locus::kHost);
  CHECK(host_view == payload);
  auto [dev_view, t2] = dev.read_blocks(10, 3, PathKind::kPeerToPeer, Locus::kDevice);
  CHECK(dev_view == payload);
}

TEST_CASE("misaligned payload length is rejected") {
  Device dev(small_config());
  std::vector<std::byte> short_payload(512 + 7);
  CHECK_THROWS_WITH_AS(
      dev.write_blocks(0, 2, short_payload, PathKind::kHostMediated, Locus::kHost),
      doctest::Contains("MisalignedLength"), Error);
}

TEST_CASE("out-of-range accesses are rejected") {
  Device dev(small_config());
  std::vector<std::byte> block(512);
  CHECK_THROWS_AS(dev.write_blocks(256, 1, block, PathKind::kHostMediated, Locus::kHost),
                  Error);
  CHECK_THROWS_AS(dev.read_blocks(250, 10, PathKind::kHostMediated, Locus::kHost), Error);
  try {
    dev.read_blocks(255, 2, PathKind::kHostMediated, Locus::kHost);
    FAIL("expected range error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRangeOutOfBounds);
  }
}

TEST_CASE("p2p to a host endpoint is not a route") {
  Device dev(small_config());
  try {
    dev.read_blocks(0, 1, PathKind::kPeerToPeer, Locus::kHost);
    FAIL("expected PathNotPermitted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPathNotPermitted);
  }
}

TEST_CASE("hop accounting: p2p is one hop, host-mediated device reads bounce twice") {
  auto cfg = small_config(0.0);  // jitter off: durations are exactly nominal
  Device dev(cfg);
  u64 bytes = 2 * 512;
  auto payload = pattern_bytes(bytes, 2);
  dev.write_blocks(0, 2, payload, PathKind::kHostMediated, Locus::kHost);

  u64 p2p_nominal = dev.transfer_time_ns(bytes, PathKind::kPeerToPeer);
  u64 host_nominal = dev.transfer_time_ns(bytes, PathKind::kHostMediated);

  auto [d1, t_p2p] = dev.read_blocks(0, 2, PathKind::kPeerToPeer, Locus::kDevice);
  CHECK(t_p2p.elapsed_ns() == p2p_nominal);

  auto [d2, t_host] = dev.read_blocks(0, 2, PathKind::kHostMediated, Locus::kHost);
  CHECK(t_host.elapsed_ns() == host_nominal);

  // Device-bound data over the host-mediated path crosses the host boundary
  // twice.
  auto [d3, t_bounce] = dev.read_blocks(0, 2, PathKind::kHostMediated, Locus::kDevice);
  CHECK(t_bounce.elapsed_ns() == 2 * host_nominal);

  PathCounters counters = dev.counters();
  CHECK(counters.host_bytes == bytes /*write*/ + bytes /*host read*/ + 2 * bytes /*bounce*/);
  CHECK(counters.intra_bytes == bytes /*p2p read*/);
}

TEST_CASE("commands serialize on one timeline: submit equals start, clock is monotone") {
  Device dev(small_config(0.01));
  auto payload = pattern_bytes(512, 3);
  u64 prev_end = 0;
  for (int i = 0; i < 10; ++i) {
    auto t = dev.write_blocks(static_cast<u64>(i), 1, payload, PathKind::kHostMediated,
                              Locus::kHost);
    CHECK(t.submit_ns == t.start_ns);
    CHECK(t.start_ns >= prev_end);
    CHECK(t.end_ns > t.start_ns);
    prev_end = t.end_ns;
  }
  CHECK(dev.now_ns() == prev_end);
}

TEST_CASE("billed transfers jitter within the configured band and are seed-deterministic") {
  auto cfg = small_config(0.01);
  cfg.jitter_seed = 77;
  Device a(cfg);
  Device b(cfg);
  u64 bytes = 8 * 512;
  u64 nominal = a.transfer_time_ns(bytes, PathKind::kHostMediated);
  bool saw_deviation = false;
  for (int i = 0; i < 200; ++i) {
    auto ta = a.bill_transfer(bytes, PathKind::kHostMediated, Locus::kHost);
    auto tb = b.bill_transfer(bytes, PathKind::kHostMediated, Locus::kHost);
    CHECK(ta.elapsed_ns() == tb.elapsed_ns());
    auto lo = static_cast<u64>(static_cast<double>(nominal) * 0.99) - 1;
    auto hi = static_cast<u64>(static_cast<double>(nominal) * 1.01) + 1;
    CHECK(ta.elapsed_ns() >= lo);
    CHECK(ta.elapsed_ns() <= hi);
    if (ta.elapsed_ns() != nominal) saw_deviation = true;
  }
  CHECK(saw_deviation);

  cfg.jitter_seed = 78;
  Device c(cfg);
  bool differs = false;
  for (int i = 0; i < 200; ++i) {
    auto tc = c.bill_transfer(bytes, PathKind::kHostMediated, Locus::kHost);
    auto ta = a.transfer_time_ns(bytes, PathKind::kHostMediated);
    differs = differs || tc.elapsed_ns() != ta;
  }
  CHECK(differs);
}

TEST_CASE("kernel billing never jitters") {
  auto cfg = small_config(0.01);
  Device dev(cfg);
  KernelConfig kcfg;
  u64 nominal = dev.kernel_time_ns(384, KernelMode::kSoftware, kcfg);
  for (int i = 0; i < 20; ++i) {
    auto t = dev.bill_kernel(384, KernelMode::kSoftware, kcfg);
    CHECK(t.elapsed_ns() == nominal);
  }
}

TEST_CASE("epochs increase per committed block and stamp the commit time") {
  Device dev(small_config());
  auto payload = pattern_bytes(2 * 512, 4);
  dev.write_blocks(5, 2, payload, PathKind::kHostMediated, Locus::kHost);
  u64 e5 = dev.lba_epoch(5);
  u64 e6 = dev.lba_epoch(6);
  CHECK(e5 != e6);
  dev.write_blocks(5, 1, pattern_bytes(512, 5), PathKind::kHostMediated, Locus::kHost);
  CHECK(dev.lba_epoch(5) > e5);
  CHECK(dev.lba_epoch(5) > e6);
  CHECK(dev.lba_written_at(5) > dev.lba_written_at(6));
}

TEST_CASE("pre-write hooks run in ascending priority, registration order breaking ties") {
  Device dev(small_config());
  std::vector<int> order;
  auto rec = [&order](int tag) {
    return PreWriteHook([&order, tag](WriteRequest&, DeviceContext&) {
      order.push_back(tag);
      return WriteVerdict::pass();
    });
  };
  dev.add_hook(HookStage::kPreWrite, 50, rec(50));
  dev.add_hook(HookStage::kPreWrite, 10, rec(10));
  dev.add_hook(HookStage::kPreWrite, 50, rec(51));
  dev.write_blocks(0, 1, pattern_bytes(512, 6), PathKind::kHostMediated, Locus::kHost);
  CHECK(order == std::vector<int>{10, 50, 51});
}

TEST_CASE("a fail verdict aborts the whole write atomically") {
  Device dev(small_config());
  dev.write_blocks(1, 1, pattern_bytes(512, 7), PathKind::kHostMediated, Locus::kHost);
  auto before = dev.peek_block(1);
  u64 epoch_before = dev.lba_epoch(1);

  dev.add_hook(HookStage::kPreWrite, 0,
               PreWriteHook([](WriteRequest& req, DeviceContext&) {
                 if (req.lba == 2) return WriteVerdict::fail(ErrorCode::kInvalidRule);
                 return WriteVerdict::pass();
               }));
  auto counters_before = dev.counters();
  CHECK_THROWS_AS(dev.write_blocks(0, 4, pattern_bytes(4 * 512, 8),
                                   PathKind::kHostMediated, Locus::kHost),
                  Error);
  // No block of the failed command landed, including those inspected before
  // the failing one.
  CHECK_FALSE(dev.lba_live(0));
  CHECK_FALSE(dev.lba_live(3));
  CHECK(dev.peek_block(1) == before);
  CHECK(dev.lba_epoch(1) == epoch_before);
  CHECK(dev.counters().blocks_written == counters_before.blocks_written);
}

TEST_CASE("a drop verdict skips one block without short-circuiting the rest") {
  Device dev(small_config());
  int later_hook_saw = 0;
  dev.add_hook(HookStage::kPreWrite, 0,
               PreWriteHook([](WriteRequest& req, DeviceContext&) {
                 if (req.lba == 1) return WriteVerdict::drop();
                 return WriteVerdict::pass();
               }));
  dev.add_hook(HookStage::kPreWrite, 5,
               PreWriteHook([&later_hook_saw](WriteRequest&, DeviceContext&) {
                 ++later_hook_saw;
                 return WriteVerdict::pass();
               }));
  dev.write_blocks(0, 3, pattern_bytes(3 * 512, 9), PathKind::kHostMediated, Locus::kHost);
  CHECK(dev.lba_live(0));
  CHECK_FALSE(dev.lba_live(1));
  CHECK(dev.lba_live(2));
  CHECK(later_hook_saw == 3);  // the dropped block still reached later hooks
}

TEST_CASE("mutations from pre-write hooks land on media") {
  Device dev(small_config());
  dev.add_hook(HookStage::kPreWrite, 0,
               PreWriteHook([](WriteRequest& req, DeviceContext&) {
                 req.payload[0] = std::byte{0xEE};
                 return WriteVerdict::mutate();
               }));
  dev.write_blocks(4, 1, std::vector<std::byte>(512, std::byte{0x11}),
                   PathKind::kHostMediated, Locus::kHost);
  CHECK(dev.peek_block(4)[0] == std::byte{0xEE});
  CHECK(dev.peek_block(4)[1] == std::byte{0x11});
}

TEST_CASE("post-read hooks mutate the returned copy, never the media") {
  Device dev(small_config());
  dev.write_blocks(0, 1, std::vector<std::byte>(512, std::byte{0x22}),
                   PathKind::kHostMediated, Locus::kHost);
  dev.add_hook(HookStage::kPostRead, 0,
               PostReadHook([](ReadResponse& resp, DeviceContext&) {
                 resp.payload[0] = std::byte{0x99};
                 return ReadVerdict::mutate();
               }));
  auto [data, t] = dev.read_blocks(0, 1, PathKind::kHostMediated, Locus::kHost);
  CHECK(data[0] == std::byte{0x99});
  CHECK(dev.peek_block(0)[0] == std::byte{0x22});
}

TEST_CASE("hook stage and handler type must agree; unknown ids are rejected") {
  Device dev(small_config());
  CHECK_THROWS_AS(dev.add_hook(HookStage::kPostRead, 0,
                               PreWriteHook([](WriteRequest&, DeviceContext&) {
                                 return WriteVerdict::pass();
                               })),
                  Error);
  CHECK_THROWS_AS(dev.remove_hook(424242), Error);
  u64 id = dev.add_hook(HookStage::kPreWrite, 0,
                        PreWriteHook([](WriteRequest&, DeviceContext&) {
                          return WriteVerdict::fail(ErrorCode::kInvalidRule);
                        }));
  dev.remove_hook(id);
  // Removed hook no longer fires.
  dev.write_blocks(0, 1, pattern_bytes(512, 10), PathKind::kHostMediated, Locus::kHost);
  CHECK(dev.lba_live(0));
}

TEST_CASE("restore_block bypasses interceptors and bills the intra path") {
  Device dev(small_config());
  dev.add_hook(HookStage::kPreWrite, 0,
               PreWriteHook([](WriteRequest&, DeviceContext&) {
                 return WriteVerdict::fail(ErrorCode::kDeviceFrozen);
               }));
  CHECK_THROWS_AS(dev.write_blocks(0, 1, pattern_bytes(512, 11),
                                   PathKind::kHostMediated, Locus::kHost),
                  Error);
  auto counters_before = dev.counters();
  auto payload = pattern_bytes(512, 12);
  dev.restore_block(9, payload);
  CHECK(dev.lba_live(9));
  CHECK(dev.peek_block(9) == payload);
  CHECK(dev.counters().intra_bytes == counters_before.intra_bytes + 512);
}

TEST_CASE("random workload agrees with an in-memory reference model") {
  Device dev(small_config(0.01));
  std::map<u64, std::vector<std::byte>> model;
  util::Rng rng(2024);
  for (int step = 0; step < 300; ++step) {
    u64 lba = rng.next_below(256);
    u64 max_count = std::min<u64>(4, 256 - lba);
    u64 count = 1 + rng.next_below(max_count);
    if (rng.next_below(100) < 55) {
      auto payload = pattern_bytes(count * 512, rng.next_u64());
      dev.write_blocks(lba, count, payload, PathKind::kHostMediated, Locus::kHost);
      for (u64 i = 0; i < count; ++i) {
        model[lba + i] = {payload.begin() + static_cast<long>(i * 512),
                          payload.begin() + static_cast<long>((i + 1) * 512)};
      }
    } else {
      auto [data, t] = dev.read_blocks(lba, count, PathKind::kPeerToPeer, Locus::kDevice);
      for (u64 i = 0; i < count; ++i) {
        std::vector<std::byte> got(data.begin() + static_cast<long>(i * 512),
                                   data.begin() + static_cast<long>((i + 1) * 512));
        auto it = model.find(lba + i);
        if (it == model.end()) {
          CHECK(got == std::vector<std::byte>(512, std::byte{0}));
        } else {
          CHECK(got == it->second);
        }
      }
    }
  }
  CHECK(dev.num_live_blocks() == model.size());
}

TEST_CASE("snapshot round trip preserves contents, liveness, and geometry") {
  auto path = std::filesystem::temp_directory_path() / "csdguard_dev_snap_test.img";
  auto cfg = small_config();
  Device dev(cfg);
  auto p1 = pattern_bytes(512, 13);
  dev.write_blocks(3, 1, p1, PathKind::kHostMediated, Locus::kHost);
  // A live block whose content is all zeroes must stay distinguishable from
  // a never-written one.
  dev.write_blocks(200, 1, std::vector<std::byte>(512, std::byte{0}),
                   PathKind::kHostMediated, Locus::kHost);
  dev.save_snapshot(path);

  DeviceConfig other;
  other.block_size = 4096;  // snapshot geometry wins
  Device loaded(other);
  loaded.load_snapshot(path);
  CHECK(loaded.block_size() == 512);
  CHECK(loaded.config().num_blocks == 256);
  CHECK(loaded.num_live_blocks() == 2);
  CHECK(loaded.peek_block(3) == p1);
  CHECK(loaded.lba_live(200));
  CHECK_FALSE(loaded.lba_live(0));
  std::filesystem::remove(path);
}

TEST_CASE("corrupt or truncated snapshots are rejected") {
  auto dir = std::filesystem::temp_directory_path();
  auto good = dir / "csdguard_snap_good.img";
  auto bad = dir / "csdguard_snap_bad.img";
  Device dev(small_config());
  dev.write_blocks(0, 1, pattern_bytes(512, 14), PathKind::kHostMediated, Locus::kHost);
  dev.save_snapshot(good);

  {
    std::ifstream in(good, std::ios::binary);
    std::vector<char> img((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    img[0] = 'X';
    std::ofstream out(bad, std::ios::binary);
    out.write(img.data(), static_cast<std::streamsize>(img.size()));
  }
  Device victim(small_config());
  CHECK_THROWS_AS(victim.load_snapshot(bad), Error);

  {
    std::ifstream in(good, std::ios::binary);
    std::vector<char> img((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    std::ofstream out(bad, std::ios::binary);
    out.write(img.data(), static_cast<std::streamsize>(img.size() / 2));
  }
  CHECK_THROWS_AS(victim.load_snapshot(bad), Error);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST_SUITE_END();
