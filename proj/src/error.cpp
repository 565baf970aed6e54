// Copyright 2026 The CSDGuard Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "csd/error.hpp"

namespace csd {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::kDestinationTooSmall: return "DestinationTooSmall";
    case ErrorCode::kMisalignedLength: return "MisalignedLength";
    case ErrorCode::kUnsupportedSize: return "UnsupportedSize";
    case ErrorCode::kOutOfDeviceMemory: return "OutOfDeviceMemory";
    case ErrorCode::kUseAfterFree: return "UseAfterFree";
    case ErrorCode::kPathNotPermitted: return "PathNotPermitted";
    case ErrorCode::kUnknownKernel: return "UnknownKernel";
    case ErrorCode::kBufferShapeMismatch: return "BufferShapeMismatch";
    case ErrorCode::kUnknownHookId: return "UnknownHookId";
    case ErrorCode::kNegativeInterval: return "NegativeInterval";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroInverse: return "ZeroInverse";
    case ErrorCode::kBlockSizeMismatch: return "BlockSizeMismatch";
    case ErrorCode::kTooFewSurvivors: return "TooFewSurvivors";
    case ErrorCode::kSingularSubmatrix: return "SingularSubmatrix";
    case ErrorCode::kNotSingleErasure: return "NotSingleErasure";
    case ErrorCode::kUnrecoverablePattern: return "UnrecoverablePattern";
    case ErrorCode::kInvalidRule: return "InvalidRule";
    case ErrorCode::kReadFault: return "ReadFault";
    case ErrorCode::kShadowBudgetExceeded: return "ShadowBudgetExceeded";
    case ErrorCode::kNothingToRecover: return "NothingToRecover";
    case ErrorCode::kDeviceFrozen: return "DeviceFrozen";
    case ErrorCode::kMissingPath: return "MissingPath";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "UnknownError";
}

}  // namespace csd
