// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/bench/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "csd/error.hpp"
#include "csd/util/base64.hpp"
#include "csd/util/rng.hpp"

namespace csd::bench {

namespace {

using nlohmann::json;

[[noreturn]] void fail_at(const std::string& origin, size_t line, const std::string& what) {
  throw_error(ErrorCode::kParseError, origin + ":" + std::to_string(line) + ": " + what);
}

u64 require_u64(const json& obj, const char* key, const std::string& origin, size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) fail_at(origin, line, std::string("missing key '") + key + "'");
  if (!it->is_number_unsigned()) {
    fail_at(origin, line, std::string("'") + key + "' must be a non-negative integer");
  }
  return it->get<u64>();
}

constexpr const char* kKnownKeys[] = {"seq",        "time_ns",     "op",
                                      "lba",        "len_blocks",  "payload_b64",
                                      "payload_digest"};

}  // namespace

std::vector<IoTraceRecord> parse_trace(std::istream& in, const std::string& origin) {
  std::vector<IoTraceRecord> records;
  std::string line;
  size_t line_no = 0;
  bool have_prev_seq = false;
  u64 prev_seq = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      fail_at(origin, line_no, "not a JSON object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : kKnownKeys) known = known || it.key() == k;
      if (!known) fail_at(origin, line_no, "unknown key '" + it.key() + "'");
    }

    IoTraceRecord rec;
    rec.seq = require_u64(obj, "seq", origin, line_no);
    rec.time_ns = require_u64(obj, "time_ns", origin, line_no);
    rec.lba = require_u64(obj, "lba", origin, line_no);
    rec.len_blocks = require_u64(obj, "len_blocks", origin, line_no);
    if (rec.len_blocks == 0) fail_at(origin, line_no, "len_blocks must be >= 1");

    auto op_it = obj.find("op");
    if (op_it == obj.end() || !op_it->is_string()) {
      fail_at(origin, line_no, "missing or non-string 'op'");
    }
    std::string op = op_it->get<std::string>();
    if (op == "read") {
      rec.op = TraceOp::kRead;
    } else if (op == "write") {
      rec.op = TraceOp::kWrite;
    } else {
      fail_at(origin, line_no, "op must be 'read' or 'write', got '" + op + "'");
    }

    bool has_inline = obj.contains("payload_b64");
    bool has_digest = obj.contains("payload_digest");
    if (rec.op == TraceOp::kRead) {
      if (has_inline || has_digest) fail_at(origin, line_no, "read records carry no payload");
    } else {
      if (has_inline == has_digest) {
        fail_at(origin, line_no,
                "write records need exactly one of payload_b64 or payload_digest");
      }
      if (has_inline) {
        const json& p = obj["payload_b64"];
        if (!p.is_string()) fail_at(origin, line_no, "payload_b64 must be a string");
        std::vector<std::byte> raw;
        try {
          raw = util::base64_decode(p.get<std::string>());
        } catch (const Error& e) {
          fail_at(origin, line_no, e.what());
        }
        std::vector<u8> bytes(raw.size());
        for (size_t i = 0; i < raw.size(); ++i) bytes[i] = static_cast<u8>(raw[i]);
        rec.payload = std::move(bytes);
      } else {
        rec.payload_digest = require_u64(obj, "payload_digest", origin, line_no);
      }
    }

    if (have_prev_seq && rec.seq <= prev_seq) {
      fail_at(origin, line_no,
              "seq " + std::to_string(rec.seq) + " does not increase past " +
                  std::to_string(prev_seq));
    }
    prev_seq = rec.seq;
    have_prev_seq = true;
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<IoTraceRecord> load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kParseError, path + ": cannot open trace file");
  return parse_trace(in, path);
}

void serialize_trace(std::ostream& out, const std::vector<IoTraceRecord>& records) {
  for (const IoTraceRecord& rec : records) {
    json obj;
    obj["seq"] = rec.seq;
    obj["time_ns"] = rec.time_ns;
    obj["op"] = rec.op == TraceOp::kRead ? "read" : "write";
    obj["lba"] = rec.lba;
    obj["len_blocks"] = rec.len_blocks;
    if (rec.op == TraceOp::kWrite) {
      if (rec.payload.has_value()) {
        std::vector<std::byte> raw(rec.payload->size());
        for (size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<std::byte>((*rec.payload)[i]);
        obj["payload_b64"] = util::base64_encode(raw);
      } else if (rec.payload_digest.has_value()) {
        obj["payload_digest"] = *rec.payload_digest;
      }
    }
    out << obj.dump() << '\n';
  }
}

void save_trace(const std::string& path, const std::vector<IoTraceRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorCode::kParseError, path + ": cannot open for writing");
  serialize_trace(out, records);
}

std::vector<std::byte> materialize_payload(const IoTraceRecord& record, u32 block_size) {
  size_t want = static_cast<size_t>(record.len_blocks) * block_size;
  if (record.payload.has_value()) {
    if (record.payload->size() != want) {
      throw_error(ErrorCode::kBlockSizeMismatch,
                  "inline payload is " + std::to_string(record.payload->size()) +
                      " bytes, record spans " + std::to_string(want));
    }
    std::vector<std::byte> out(want);
    for (size_t i = 0; i < want; ++i) out[i] = static_cast<std::byte>((*record.payload)[i]);
    return out;
  }
  if (record.payload_digest.has_value()) {
    std::vector<std::byte> out(want);
    util::Rng rng(*record.payload_digest);
    for (auto& b : out) b = static_cast<std::byte>(rng.next_byte());
    return out;
  }
  throw_error(ErrorCode::kInvalidConfig,
              "write record seq " + std::to_string(record.seq) + " has no payload");
}

ReplayResult replay_trace(api::Session& session, const std::vector<IoTraceRecord>& records,
                          const std::function<void(const IoTraceRecord&)>& after_record) {
  ReplayResult result;
  u32 bs = session.device().block_size();
  for (const IoTraceRecord& rec : records) {
    try {
      if (rec.op == TraceOp::kWrite) {
        auto payload = materialize_payload(rec, bs);
        session.write_from_host(rec.lba, rec.len_blocks, payload);
        ++result.writes_ok;
      } else {
        session.read_to_host(rec.lba, rec.len_blocks);
        ++result.reads_ok;
      }
    } catch (const Error& e) {
      if (rec.op == TraceOp::kWrite) {
        ++result.write_rejections;
      } else {
        ++result.read_errors;
      }
      if (result.first_error.empty()) {
        result.first_error = "seq " + std::to_string(rec.seq) + ": " + e.what();
      }
    }
    if (after_record) after_record(rec);
  }
  return result;
}

std::vector<IoTraceRecord> make_benign_trace(u64 start_lba, u64 count, u32 block_size,
                                             u64 start_seq, u64 start_time_ns) {
  std::vector<IoTraceRecord> records;
  records.reserve(count);
  for (u64 i = 0; i < count; ++i) {
    IoTraceRecord rec;
    rec.seq = start_seq + i;
    rec.time_ns = start_time_ns + i * 1000;
    rec.op = TraceOp::kWrite;
    rec.lba = start_lba + i;
    rec.len_blocks = 1;
    rec.payload = std::vector<u8>(block_size, 0);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<IoTraceRecord> make_attack_trace(u64 start_lba, u64 count, u64 seed,
                                             u64 start_seq, u64 start_time_ns) {
  std::vector<IoTraceRecord> records;
  records.reserve(count * 2);
  util::Rng rng(seed);
  for (u64 i = 0; i < count; ++i) {
    IoTraceRecord rd;
    rd.seq = start_seq + 2 * i;
    rd.time_ns = start_time_ns + 2 * i * 1000;
    rd.op = TraceOp::kRead;
    rd.lba = start_lba + i;
    records.push_back(rd);

    IoTraceRecord wr;
    wr.seq = start_seq + 2 * i + 1;
    wr.time_ns = start_time_ns + (2 * i + 1) * 1000;
    wr.op = TraceOp::kWrite;
    wr.lba = start_lba + i;
    wr.payload_digest = rng.next_u64();
    records.push_back(wr);
  }
  return records;
}

std::vector<IoTraceRecord> make_mixed_trace(u64 start_lba, u64 lba_span, u64 count,
                                            u64 seed, u64 start_seq, u64 start_time_ns) {
  std::vector<IoTraceRecord> records;
  records.reserve(count);
  util::Rng rng(seed);
  for (u64 i = 0; i < count; ++i) {
    IoTraceRecord rec;
    rec.seq = start_seq + i;
    rec.time_ns = start_time_ns + i * 1000;
    rec.lba = start_lba + rng.next_below(lba_span);
    if (rng.next_below(100) < 60) {
      rec.op = TraceOp::kWrite;
      rec.payload_digest = rng.next_u64();
    } else {
      rec.op = TraceOp::kRead;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace csd::bench
