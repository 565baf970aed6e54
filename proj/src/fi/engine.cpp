// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/fi/engine.hpp"

#include <cmath>

#include "json.hpp"

#include "csd/util/fnv.hpp"

namespace csd::fi {

using device::DeviceContext;
using device::ReadResponse;
using device::ReadVerdict;
using device::WriteRequest;
using device::WriteVerdict;

std::string serialize_injection_log(const InjectionLog& log) {
  std::string out;
  for (const InjectionRecord& rec : log) {
    nlohmann::json j{{"time_ns", rec.time_ns},
                     {"rule_id", rec.rule_id},
                     {"lba", rec.lba},
                     {"op", rec.op},
                     {"action", rec.action}};
    out += j.dump();
    out += "\n";
  }
  return out;
}

FaultEngine::FaultEngine(api::Session& session, FaultPlan plan, int priority)
    : session_(session) {
  validate_plan(plan, session.device().block_size());
  states_.reserve(plan.rules.size());
  for (size_t i = 0; i < plan.rules.size(); ++i) {
    states_.push_back(RuleState{std::move(plan.rules[i]), 0,
                                util::Rng(util::derive_seed(plan.seed, i))});
  }
  pre_hook_ = session_
                  .register_interceptor(priority,
                                        device::PreWriteHook([this](WriteRequest& req,
                                                                    DeviceContext& ctx) {
                                          return on_write(req, ctx);
                                        }))
                  .hook_id;
  post_hook_ = session_
                   .register_interceptor(priority,
                                         device::PostReadHook([this](ReadResponse& resp,
                                                                     DeviceContext& ctx) {
                                           return on_read(resp, ctx);
                                         }))
                   .hook_id;
  installed_ = true;
}

FaultEngine::~FaultEngine() {
  try {
    uninstall();
  } catch (...) {
    // Destructor must not throw; a torn-down device already removed us.
  }
}

void FaultEngine::uninstall() {
  if (!installed_) return;
  installed_ = false;
  session_.unregister_interceptor(pre_hook_);
  session_.unregister_interceptor(post_hook_);
}

bool FaultEngine::should_fire(RuleState& st) {
  switch (st.rule.occurrence.kind) {
    case Occurrence::Kind::kEvery: return true;
    case Occurrence::Kind::kNth: return st.matched == st.rule.occurrence.n;
    case Occurrence::Kind::kAfter: return st.matched > st.rule.occurrence.n;
    case Occurrence::Kind::kProbability: return st.rng.next_double() < st.rule.occurrence.p;
  }
  return false;
}

WriteVerdict FaultEngine::on_write(WriteRequest& req, DeviceContext& ctx) {
  bool dropped = false;
  bool mutated = false;
  for (RuleState& st : states_) {
    const FaultRule& rule = st.rule;
    if (!rule.enabled) continue;
    if (rule.op == OpMask::kRead) continue;
    if (!rule.lba.matches(req.lba)) continue;
    ++st.matched;
    if (!should_fire(st)) continue;

    std::string action;
    switch (rule.action.kind) {
      case FaultAction::Kind::kBitFlip:
        req.payload[rule.action.byte_offset] ^= std::byte{1} << rule.action.bit;
        mutated = true;
        action = "bit_flip(byte_offset=" + std::to_string(rule.action.byte_offset) +
                 ",bit=" + std::to_string(rule.action.bit) + ")";
        break;
      case FaultAction::Kind::kZeroBlock:
        std::fill(req.payload.begin(), req.payload.end(), std::byte{0});
        mutated = true;
        action = "zero_block";
        break;
      case FaultAction::Kind::kDropWrite:
        dropped = true;
        action = "drop_write";
        break;
      case FaultAction::Kind::kShornWrite: {
        const u32 bs = ctx.block_size();
        const auto cut = static_cast<size_t>(
            std::ceil(rule.action.prefix_fraction * static_cast<double>(bs)));
        std::vector<std::byte> old = ctx.peek_block(req.lba);
        std::copy(old.begin() + cut, old.end(), req.payload.begin() + cut);
        mutated = true;
        action = "shorn_write(cut=" + std::to_string(cut) + ")";
        break;
      }
      case FaultAction::Kind::kDelay:
        ctx.add_delay(rule.action.delay_ns);
        action = "delay(ns=" + std::to_string(rule.action.delay_ns) + ")";
        break;
      case FaultAction::Kind::kReadError:
        continue;  // unreachable: validation pins read_error to op=read
    }
    log_.push_back(InjectionRecord{ctx.now_ns(), rule.rule_id, req.lba, "write", action});
  }
  if (dropped) return WriteVerdict::drop();
  if (mutated) return WriteVerdict::mutate();
  return WriteVerdict::pass();
}

ReadVerdict FaultEngine::on_read(ReadResponse& resp, DeviceContext& ctx) {
  bool mutated = false;
  bool failed = false;
  int error_code = 0;
  for (RuleState& st : states_) {
    const FaultRule& rule = st.rule;
    if (!rule.enabled) continue;
    if (rule.op == OpMask::kWrite) continue;
    if (!rule.lba.matches(resp.lba)) continue;
    ++st.matched;
    if (!should_fire(st)) continue;

    std::string action;
    switch (rule.action.kind) {
      case FaultAction::Kind::kBitFlip:
        resp.payload[rule.action.byte_offset] ^= std::byte{1} << rule.action.bit;
        mutated = true;
        action = "bit_flip(byte_offset=" + std::to_string(rule.action.byte_offset) +
                 ",bit=" + std::to_string(rule.action.bit) + ")";
        break;
      case FaultAction::Kind::kZeroBlock:
        std::fill(resp.payload.begin(), resp.payload.end(), std::byte{0});
        mutated = true;
        action = "zero_block";
        break;
      case FaultAction::Kind::kReadError:
        if (!failed) {
          failed = true;
          error_code = rule.action.error_code;
        }
        action = "read_error(code=" + std::to_string(rule.action.error_code) + ")";
        break;
      case FaultAction::Kind::kDelay:
        ctx.add_delay(rule.action.delay_ns);
        action = "delay(ns=" + std::to_string(rule.action.delay_ns) + ")";
        break;
      case FaultAction::Kind::kDropWrite:
      case FaultAction::Kind::kShornWrite:
        continue;  // unreachable: validation pins these to op=write
    }
    log_.push_back(InjectionRecord{ctx.now_ns(), rule.rule_id, resp.lba, "read", action});
  }
  if (failed) return ReadVerdict::fail(ErrorCode::kReadFault, error_code);
  if (mutated) return ReadVerdict::mutate();
  return ReadVerdict::pass();
}

u64 block_digest(std::span<const std::byte> payload) { return util::fnv1a64(payload); }

std::map<u64, u64> digest_live_blocks(device::Device& dev) {
  std::map<u64, u64> digests;
  dev.for_each_live_block([&](u64 lba, const device::FlashNamespace::Block& blk) {
    digests[lba] = block_digest(blk.payload);
  });
  return digests;
}

std::vector<u64> checksum_scan(device::Device& dev, const std::map<u64, u64>& expected) {
  std::map<u64, u64> current = digest_live_blocks(dev);
  std::vector<u64> corrupted;
  auto differs = [&](u64 lba) {
    auto e = expected.find(lba);
    auto c = current.find(lba);
    if (e == expected.end() || c == current.end()) return true;  // appeared or vanished
    return e->second != c->second;
  };
  for (const auto& [lba, digest] : expected) {
    (void)digest;
    if (differs(lba)) corrupted.push_back(lba);
  }
  for (const auto& [lba, digest] : current) {
    (void)digest;
    if (!expected.contains(lba) && differs(lba)) corrupted.push_back(lba);
  }
  std::sort(corrupted.begin(), corrupted.end());
  return corrupted;
}

}  // namespace csd::fi
