// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "csd/device/device.hpp"

namespace csd::device {

// Key-value device configuration, one `key = value` pair per line, `#`
// comments. Unknown keys are rejected so typos surface instead of silently
// keeping a default. Anchor tables use `dim:seconds` pairs joined by commas,
// e.g. `sw_anchors = 384:0.062,1536:2.876`.
DeviceConfig parse_device_config(std::istream& in, const std::string& origin);
DeviceConfig load_device_config(const std::filesystem::path& path);
std::string serialize_device_config(const DeviceConfig& cfg);
void save_device_config(const DeviceConfig& cfg, const std::filesystem::path& path);

}  // namespace csd::device
