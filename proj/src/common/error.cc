// Copyright 2026 The tdubench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tdu/common/error.h"

namespace tdu {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kUnknownMotor: return "unknown_motor";
    case ErrorCode::kDriveFault: return "drive_fault";
    case ErrorCode::kBackendTimeout: return "backend_timeout";
    case ErrorCode::kPlantFault: return "plant_fault";
    case ErrorCode::kSingularFit: return "singular_fit";
    case ErrorCode::kNoExcitation: return "no_excitation";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kNonPhysical: return "non_physical";
    case ErrorCode::kNotReached: return "not_reached";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kCalibration: return "calibration";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

MotorId MotorIdFromInt(int value) {
  if (value == 1) return MotorId::kMotor1;
  if (value == 2) return MotorId::kMotor2;
  throw Error(ErrorCode::kUnknownMotor,
              "motor id must be 1 or 2, got " + std::to_string(value));
}

}  // namespace tdu
