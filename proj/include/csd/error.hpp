// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace csd {

enum class ErrorCode {
  // device model
  kRangeOutOfBounds,
  kDestinationTooSmall,
  kMisalignedLength,
  kUnsupportedSize,
  // library surface
  kOutOfDeviceMemory,
  kUseAfterFree,
  kPathNotPermitted,
  kUnknownKernel,
  kBufferShapeMismatch,
  kUnknownHookId,
  kNegativeInterval,
  // kernels
  kDimensionMismatch,
  kZeroInverse,
  // erasure coding
  kBlockSizeMismatch,
  kTooFewSurvivors,
  kSingularSubmatrix,
  kNotSingleErasure,
  kUnrecoverablePattern,
  // fault injection
  kInvalidRule,
  kReadFault,
  // ransomware guard
  kShadowBudgetExceeded,
  kNothingToRecover,
  kDeviceFrozen,
  // reporting / IO
  kMissingPath,
  kInvalidConfig,
  kParseError,
};

const char* error_name(ErrorCode code);

// Domain error carrying a stable code. `detail` holds an auxiliary value for
// codes that need one (injected read-error codes).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int detail = 0)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const { return code_; }
  int detail() const { return detail_; }

 private:
  ErrorCode code_;
  int detail_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message,
                                     int detail = 0) {
  throw Error(code, message, detail);
}

}  // namespace csd
