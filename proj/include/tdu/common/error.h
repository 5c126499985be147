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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tdu {

/// Machine-readable failure classes shared by every module.
enum class ErrorCode : std::uint8_t {
  kConfig,
  kOutOfRange,
  kUnknownMotor,
  kDriveFault,
  kBackendTimeout,
  kPlantFault,
  kSingularFit,
  kNoExcitation,
  kInsufficientData,
  kNonPhysical,
  kNotReached,
  kProtocol,
  kCalibration,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Carries the last observed value when a threshold or cutoff is never met.
class NotReachedError : public Error {
 public:
  NotReachedError(const std::string& message, double last_value)
      : Error(ErrorCode::kNotReached, message), last_value_(last_value) {}

  double last_value() const { return last_value_; }

 private:
  double last_value_;
};

/// The two drives of a TDU, numbered as on the hardware (left = 1).
enum class MotorId : std::uint8_t { kMotor1 = 1, kMotor2 = 2 };

inline constexpr MotorId kMotors[] = {MotorId::kMotor1, MotorId::kMotor2};

inline constexpr std::size_t Index(MotorId id) {
  return static_cast<std::size_t>(id) - 1;
}

/// Throws ErrorCode::kUnknownMotor for anything other than 1 or 2.
MotorId MotorIdFromInt(int value);

}  // namespace tdu
