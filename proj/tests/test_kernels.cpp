// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "csd/api/session.hpp"
#include "csd/kernels/gf256.hpp"
#include "csd/kernels/matmul.hpp"
#include "csd/kernels/matrix_io.hpp"
#include "csd/kernels/registry.hpp"
#include "csd/util/rng.hpp"

using namespace csd;
using namespace csd::kernels;

namespace {

// Independent field oracle: shift-and-add carry-less multiplication with
// immediate reduction by the field polynomial. Shares nothing with the
// log/exp-table implementation under test.
u8 peasant_mul(u8 a, u8 b) {
  u16 acc = 0;
  u16 aa = a;
  u8 bb = b;
  while (bb != 0) {
    if (bb & 1) acc ^= aa;
    aa <<= 1;
    if (aa & 0x100) aa ^= gf::kPoly;
    bb >>= 1;
  }
  return static_cast<u8>(acc);
}

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("field multiplication agrees with the shift-and-reduce oracle on all pairs") {
  for (int a = 0; a < 256; ++a) {
    for (int b = 0; b < 256; ++b) {
      if (gf::mul(static_cast<u8>(a), static_cast<u8>(b)) !=
          peasant_mul(static_cast<u8>(a), static_cast<u8>(b))) {
        FAIL("mul mismatch at a=" << a << " b=" << b);
      }
    }
  }
}

TEST_CASE("every nonzero field element has a working inverse; zero has none") {
  for (int a = 1; a < 256; ++a) {
    u8 ia = gf::inv(static_cast<u8>(a));
    CHECK(gf::mul(static_cast<u8>(a), ia) == 1);
    CHECK(gf::div(gf::mul(static_cast<u8>(a), 77), static_cast<u8>(a)) == 77);
  }
  try {
    gf::inv(0);
    FAIL("expected ZeroInverse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroInverse);
  }
}

TEST_CASE("field axioms hold on random triples") {
  util::Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    u8 a = rng.next_byte(), b = rng.next_byte(), c = rng.next_byte();
    CHECK(gf::add(a, b) == (a ^ b));
    CHECK(gf::mul(a, b) == gf::mul(b, a));
    CHECK(gf::mul(gf::mul(a, b), c) == gf::mul(a, gf::mul(b, c)));
    CHECK(gf::mul(a, gf::add(b, c)) == gf::add(gf::mul(a, b), gf::mul(a, c)));
    CHECK(gf::mul(a, 1) == a);
    CHECK(gf::mul(a, 0) == 0);
  }
}

TEST_CASE("integer matmul: identity, a hand-checked product, and wraparound") {
  auto a = MatrixU32::random(5, 1);
  CHECK(matmul_u32(a, MatrixU32::identity(5)) == a);
  CHECK(matmul_u32(MatrixU32::identity(5), a) == a);

  MatrixU32 x(2), y(2);
  x.at(0, 0) = 1; x.at(0, 1) = 2; x.at(1, 0) = 3; x.at(1, 1) = 4;
  y.at(0, 0) = 5; y.at(0, 1) = 6; y.at(1, 0) = 7; y.at(1, 1) = 8;
  MatrixU32 want(2);
  want.at(0, 0) = 19; want.at(0, 1) = 22; want.at(1, 0) = 43; want.at(1, 1) = 50;
  CHECK(matmul_u32(x, y) == want);

  MatrixU32 big(2);
  big.at(0, 0) = 0x80000000u;
  big.at(1, 1) = 0xFFFFFFFFu;
  MatrixU32 two(2);
  two.at(0, 0) = 2; two.at(1, 1) = 2;
  auto wrapped = matmul_u32(big, two);
  CHECK(wrapped.at(0, 0) == 0);            // 2^31 * 2 mod 2^32
  CHECK(wrapped.at(1, 1) == 0xFFFFFFFEu);  // (2^32-1)*2 mod 2^32

  MatrixU32 odd(3);
  CHECK_THROWS_AS(matmul_u32(x, odd), Error);
}

TEST_CASE("integer matmul is linear over wrapping addition") {
  util::Rng rng(32);
  for (int i = 0; i < 10; ++i) {
    u32 n = 1 + static_cast<u32>(rng.next_below(12));
    auto a = MatrixU32::random(n, rng.next_u64());
    auto b = MatrixU32::random(n, rng.next_u64());
    auto c = MatrixU32::random(n, rng.next_u64());
    MatrixU32 bc(n);
    for (size_t k = 0; k < bc.elements.size(); ++k) {
      bc.elements[k] = b.elements[k] + c.elements[k];
    }
    auto lhs = matmul_u32(a, bc);
    auto ab = matmul_u32(a, b);
    auto ac = matmul_u32(a, c);
    for (size_t k = 0; k < lhs.elements.size(); ++k) {
      CHECK(lhs.elements[k] == ab.elements[k] + ac.elements[k]);
    }
  }
}

TEST_CASE("parallel integer matmul is bit-identical to the serial reference") {
  util::Rng rng(33);
  for (int i = 0; i < 30; ++i) {
    u32 n = 1 + static_cast<u32>(rng.next_below(64));
    auto a = MatrixU32::random(n, rng.next_u64());
    auto b = MatrixU32::random(n, rng.next_u64());
    CHECK(matmul_u32(a, b) == reference::matmul_u32(a, b));
  }
  auto a = MatrixU32::random(96, 7);
  auto b = MatrixU32::random(96, 8);
  CHECK(matmul_u32(a, b) == reference::matmul_u32(a, b));
}

TEST_CASE("field matmul: identity, associativity, and the serial reference") {
  auto a = MatrixGF::random(6, 6, 41);
  CHECK(gf_matmul(a, MatrixGF::identity(6)) == a);
  CHECK(gf_matmul(MatrixGF::identity(6), a) == a);

  util::Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    u32 r = 1 + static_cast<u32>(rng.next_below(16));
    u32 k = 1 + static_cast<u32>(rng.next_below(16));
    u32 c = 1 + static_cast<u32>(rng.next_below(16));
    auto x = MatrixGF::random(r, k, rng.next_u64());
    auto y = MatrixGF::random(k, c, rng.next_u64());
    CHECK(gf_matmul(x, y) == reference::gf_matmul(x, y));

    u32 m = 1 + static_cast<u32>(rng.next_below(8));
    auto z = MatrixGF::random(c, m, rng.next_u64());
    CHECK(gf_matmul(gf_matmul(x, y), z) == gf_matmul(x, gf_matmul(y, z)));
  }

  MatrixGF bad(3, 4);
  CHECK_THROWS_AS(gf_matmul(a, bad), Error);
}

TEST_CASE("matrix files round trip and reject foreign content") {
  auto dir = std::filesystem::temp_directory_path();
  auto p_u32 = dir / "csdguard_m1.mat";
  auto p_gf = dir / "csdguard_m2.mat";

  auto mu = MatrixU32::random(17, 51);
  write_matrix(p_u32, mu);
  CHECK(read_matrix_u32(p_u32) == mu);

  auto mg = MatrixGF::random(9, 13, 52);
  write_matrix(p_gf, mg);
  CHECK(read_matrix_gf(p_gf) == mg);

  // Element kinds are not interchangeable.
  CHECK_THROWS_AS(read_matrix_u32(p_gf), Error);
  CHECK_THROWS_AS(read_matrix_gf(p_u32), Error);
  CHECK_THROWS_AS(read_matrix_u32(dir / "csdguard_missing.mat"), Error);

  {
    std::ofstream out(p_u32, std::ios::binary | std::ios::trunc);
    out << "junk";
  }
  CHECK_THROWS_AS(read_matrix_u32(p_u32), Error);
  std::filesystem::remove(p_u32);
  std::filesystem::remove(p_gf);
}

TEST_CASE("built-in device kernels compute the same products as the host library") {
  device::DeviceConfig dcfg;
  dcfg.block_size = 512;
  dcfg.num_blocks = 512;
  dcfg.timing.jitter_fraction = 0.0;
  device::Device dev(dcfg);
  api::Session s(dev);
  register_builtin_kernels(s);
  KernelConfig kcfg;

  SUBCASE("matmul_u32 with inferred dimension") {
    u32 n = 16;
    auto a = MatrixU32::random(n, 61);
    auto b = MatrixU32::random(n, 62);
    auto ba = s.alloc_device_buffer(a.byte_size(), true);
    auto bb = s.alloc_device_buffer(b.byte_size(), true);
    auto bc = s.alloc_device_buffer(a.byte_size(), true);
    s.upload_to_buffer(ba.id, to_bytes(a));
    s.upload_to_buffer(bb.id, to_bytes(b));
    s.launch_kernel("matmul_u32", kcfg, {ba.id, bb.id}, bc.id);
    auto got = u32_from_bytes(s.buffer_contents(bc.id), n);
    CHECK(got == reference::matmul_u32(a, b));
  }

  SUBCASE("matmul_u32 with explicit dims and padded staging buffers") {
    u32 n = 10;  // 400 bytes of payload in 512-byte buffers
    auto a = MatrixU32::random(n, 63);
    auto b = MatrixU32::random(n, 64);
    auto ba = s.alloc_device_buffer(512, true);
    auto bb = s.alloc_device_buffer(512, true);
    auto bc = s.alloc_device_buffer(512, true);
    s.upload_to_buffer(ba.id, to_bytes(a));
    s.upload_to_buffer(bb.id, to_bytes(b));
    s.launch_kernel("matmul_u32", kcfg, {ba.id, bb.id}, bc.id, {n});
    auto out_bytes = s.buffer_contents(bc.id);
    auto got = u32_from_bytes(
        std::span<const std::byte>(out_bytes.data(), a.byte_size()), n);
    CHECK(got == reference::matmul_u32(a, b));
  }

  SUBCASE("gf_matmul wants explicit rectangular dims") {
    auto x = MatrixGF::random(4, 6, 65);
    auto y = MatrixGF::random(6, 3, 66);
    auto bx = s.alloc_device_buffer(x.elements.size(), true);
    auto by = s.alloc_device_buffer(y.elements.size(), true);
    auto bz = s.alloc_device_buffer(4 * 3, true);
    s.upload_to_buffer(bx.id, to_bytes(x));
    s.upload_to_buffer(by.id, to_bytes(y));
    s.launch_kernel("gf_matmul", kcfg, {bx.id, by.id}, bz.id, {4, 6, 3});
    auto got = gf_from_bytes(s.buffer_contents(bz.id), 4, 3);
    CHECK(got == reference::gf_matmul(x, y));
    CHECK_THROWS_AS(s.launch_kernel("gf_matmul", kcfg, {bx.id, by.id}, bz.id), Error);
  }

  SUBCASE("mismatched buffer shapes are rejected before compute") {
    auto ba = s.alloc_device_buffer(16 * 16 * 4, true);
    auto bb = s.alloc_device_buffer(8 * 8 * 4, true);
    auto bc = s.alloc_device_buffer(16 * 16 * 4, true);
    CHECK_THROWS_AS(s.launch_kernel("matmul_u32", kcfg, {ba.id, bb.id}, bc.id), Error);
  }
}

TEST_SUITE_END();
