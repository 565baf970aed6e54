// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "csd/types.hpp"

namespace csd::util {

std::string base64_encode(std::span<const std::byte> data);

// Throws csd::Error{kParseError} on malformed input.
std::vector<std::byte> base64_decode(const std::string& text);

}  // namespace csd::util
