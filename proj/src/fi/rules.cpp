// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/fi/rules.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "csd/error.hpp"

namespace csd::fi {

using nlohmann::json;

namespace {

[[noreturn]] void bad_rule(const std::string& rule_id, const std::string& what) {
  throw_error(ErrorCode::kInvalidRule, "rule '" + rule_id + "': " + what);
}

json lba_to_json(const LbaPredicate& p) {
  switch (p.kind) {
    case LbaPredicate::Kind::kAny: return "any";
    case LbaPredicate::Kind::kRange: return json{{"range", json::array({p.lo, p.hi})}};
    case LbaPredicate::Kind::kSet: return json{{"set", p.lbas}};
  }
  return "any";
}

LbaPredicate lba_from_json(const json& j) {
  LbaPredicate p;
  if (j.is_string() && j.get<std::string>() == "any") {
    p.kind = LbaPredicate::Kind::kAny;
    return p;
  }
  if (j.is_object() && j.contains("range")) {
    p.kind = LbaPredicate::Kind::kRange;
    p.lo = j.at("range").at(0).get<u64>();
    p.hi = j.at("range").at(1).get<u64>();
    return p;
  }
  if (j.is_object() && j.contains("set")) {
    p.kind = LbaPredicate::Kind::kSet;
    for (const json& v : j.at("set")) p.lbas.insert(v.get<u64>());
    return p;
  }
  throw_error(ErrorCode::kInvalidRule, "lba predicate must be \"any\", {range}, or {set}");
}

json occurrence_to_json(const Occurrence& o) {
  switch (o.kind) {
    case Occurrence::Kind::kEvery: return "every";
    case Occurrence::Kind::kNth: return json{{"nth", o.n}};
    case Occurrence::Kind::kAfter: return json{{"after", o.n}};
    case Occurrence::Kind::kProbability: return json{{"probability", o.p}};
  }
  return "every";
}

Occurrence occurrence_from_json(const json& j) {
  Occurrence o;
  if (j.is_string() && j.get<std::string>() == "every") {
    o.kind = Occurrence::Kind::kEvery;
    return o;
  }
  if (j.is_object() && j.contains("nth")) {
    o.kind = Occurrence::Kind::kNth;
    o.n = j.at("nth").get<u64>();
    return o;
  }
  if (j.is_object() && j.contains("after")) {
    o.kind = Occurrence::Kind::kAfter;
    o.n = j.at("after").get<u64>();
    return o;
  }
  if (j.is_object() && j.contains("probability")) {
    o.kind = Occurrence::Kind::kProbability;
    o.p = j.at("probability").get<double>();
    return o;
  }
  throw_error(ErrorCode::kInvalidRule,
              "occurrence must be \"every\", {nth}, {after}, or {probability}");
}

json action_to_json(const FaultAction& a) {
  switch (a.kind) {
    case FaultAction::Kind::kBitFlip:
      return json{{"type", "bit_flip"}, {"byte_offset", a.byte_offset}, {"bit", a.bit}};
    case FaultAction::Kind::kZeroBlock: return json{{"type", "zero_block"}};
    case FaultAction::Kind::kDropWrite: return json{{"type", "drop_write"}};
    case FaultAction::Kind::kShornWrite:
      return json{{"type", "shorn_write"}, {"prefix_fraction", a.prefix_fraction}};
    case FaultAction::Kind::kReadError:
      return json{{"type", "read_error"}, {"code", a.error_code}};
    case FaultAction::Kind::kDelay: return json{{"type", "delay"}, {"ns", a.delay_ns}};
  }
  return json{{"type", "zero_block"}};
}

FaultAction action_from_json(const json& j) {
  FaultAction a;
  std::string type = j.at("type").get<std::string>();
  if (type == "bit_flip") {
    a.kind = FaultAction::Kind::kBitFlip;
    a.byte_offset = j.at("byte_offset").get<u32>();
    a.bit = j.at("bit").get<u32>();
  } else if (type == "zero_block") {
    a.kind = FaultAction::Kind::kZeroBlock;
  } else if (type == "drop_write") {
    a.kind = FaultAction::Kind::kDropWrite;
  } else if (type == "shorn_write") {
    a.kind = FaultAction::Kind::kShornWrite;
    a.prefix_fraction = j.at("prefix_fraction").get<double>();
  } else if (type == "read_error") {
    a.kind = FaultAction::Kind::kReadError;
    a.error_code = j.at("code").get<int>();
  } else if (type == "delay") {
    a.kind = FaultAction::Kind::kDelay;
    a.delay_ns = j.at("ns").get<u64>();
  } else {
    throw_error(ErrorCode::kInvalidRule, "unknown action type '" + type + "'");
  }
  return a;
}

const char* op_name(OpMask op) {
  switch (op) {
    case OpMask::kRead: return "read";
    case OpMask::kWrite: return "write";
    case OpMask::kBoth: return "both";
  }
  return "both";
}

OpMask op_from_string(const std::string& s) {
  if (s == "read") return OpMask::kRead;
  if (s == "write") return OpMask::kWrite;
  if (s == "both") return OpMask::kBoth;
  throw_error(ErrorCode::kInvalidRule, "op must be read, write, or both, got '" + s + "'");
}

}  // namespace

void validate_rule(const FaultRule& rule, u32 block_size) {
  if (rule.rule_id.empty()) {
    throw_error(ErrorCode::kInvalidRule, "rule with empty rule_id");
  }
  if (rule.lba.kind == LbaPredicate::Kind::kRange && rule.lba.lo > rule.lba.hi) {
    bad_rule(rule.rule_id, "range lo > hi");
  }
  if (rule.lba.kind == LbaPredicate::Kind::kSet && rule.lba.lbas.empty()) {
    bad_rule(rule.rule_id, "empty lba set");
  }
  switch (rule.occurrence.kind) {
    case Occurrence::Kind::kEvery:
    case Occurrence::Kind::kAfter:
      break;
    case Occurrence::Kind::kNth:
      if (rule.occurrence.n < 1) bad_rule(rule.rule_id, "nth needs n >= 1");
      break;
    case Occurrence::Kind::kProbability:
      if (rule.occurrence.p < 0.0 || rule.occurrence.p > 1.0) {
        bad_rule(rule.rule_id, "probability outside [0,1]");
      }
      break;
  }
  switch (rule.action.kind) {
    case FaultAction::Kind::kBitFlip:
      if (rule.action.byte_offset >= block_size) {
        bad_rule(rule.rule_id, "byte_offset " + std::to_string(rule.action.byte_offset) +
                                   " >= block size " + std::to_string(block_size));
      }
      if (rule.action.bit > 7) bad_rule(rule.rule_id, "bit > 7");
      break;
    case FaultAction::Kind::kZeroBlock:
    case FaultAction::Kind::kDelay:
      break;
    case FaultAction::Kind::kDropWrite:
      if (rule.op != OpMask::kWrite) bad_rule(rule.rule_id, "drop_write needs op=write");
      break;
    case FaultAction::Kind::kShornWrite:
      if (rule.op != OpMask::kWrite) bad_rule(rule.rule_id, "shorn_write needs op=write");
      if (rule.action.prefix_fraction <= 0.0 || rule.action.prefix_fraction >= 1.0) {
        bad_rule(rule.rule_id, "prefix_fraction outside (0,1)");
      }
      break;
    case FaultAction::Kind::kReadError:
      if (rule.op != OpMask::kRead) bad_rule(rule.rule_id, "read_error needs op=read");
      break;
  }
}

void validate_plan(const FaultPlan& plan, u32 block_size) {
  std::set<std::string> ids;
  for (const FaultRule& rule : plan.rules) {
    validate_rule(rule, block_size);
    if (!ids.insert(rule.rule_id).second) {
      throw_error(ErrorCode::kInvalidRule, "duplicate rule_id '" + rule.rule_id + "'");
    }
  }
}

std::string serialize_fault_plan(const FaultPlan& plan) {
  json j;
  j["seed"] = plan.seed;
  json rules = json::array();
  for (const FaultRule& r : plan.rules) {
    rules.push_back(json{{"rule_id", r.rule_id},
                         {"enabled", r.enabled},
                         {"lba", lba_to_json(r.lba)},
                         {"op", op_name(r.op)},
                         {"occurrence", occurrence_to_json(r.occurrence)},
                         {"action", action_to_json(r.action)}});
  }
  j["rules"] = std::move(rules);
  return j.dump(2) + "\n";
}

FaultPlan parse_fault_plan(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw_error(ErrorCode::kParseError, origin + ": " + e.what());
  }
  try {
    FaultPlan plan;
    plan.seed = j.value("seed", u64{0});
    for (const json& rj : j.at("rules")) {
      FaultRule r;
      r.rule_id = rj.at("rule_id").get<std::string>();
      r.enabled = rj.value("enabled", true);
      r.lba = lba_from_json(rj.at("lba"));
      r.op = op_from_string(rj.at("op").get<std::string>());
      r.occurrence = occurrence_from_json(rj.at("occurrence"));
      r.action = action_from_json(rj.at("action"));
      plan.rules.push_back(std::move(r));
    }
    return plan;
  } catch (const json::exception& e) {
    throw_error(ErrorCode::kParseError, origin + ": " + e.what());
  }
}

FaultPlan load_fault_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw_error(ErrorCode::kMissingPath, "cannot open " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fault_plan(ss.str(), path.string());
}

void save_fault_plan(const FaultPlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw_error(ErrorCode::kMissingPath, "cannot open " + path.string() + " for writing");
  }
  out << serialize_fault_plan(plan);
  if (!out) {
    throw_error(ErrorCode::kMissingPath, "short write to " + path.string());
  }
}

}  // namespace csd::fi
