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

// Register protocol carried in classic CAN frames. Every frame addressed to
// or from drive N uses identifier kBaseId + N and the payload layout
//
//   byte 0      opcode
//   byte 1      motor id (1 or 2), must agree with the identifier
//   bytes 2..7  opcode body, at most 6 bytes
//
// Floats are IEEE-754 binary32, little-endian. docs/wire-protocol.md has
// the byte-by-byte tables.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "tdu/common/error.h"

namespace tdu::codec {

inline constexpr std::uint16_t kBaseId = 0x100;
inline constexpr std::uint16_t kMaxId = 0x7FF;
inline constexpr std::size_t kMaxBody = 6;

struct Frame {
  std::uint16_t id = 0;
  std::uint8_t dlc = 0;
  std::array<std::uint8_t, 8> data{};

  std::span<const std::uint8_t> payload() const { return {data.data(), dlc}; }

  bool operator==(const Frame& other) const;
};

enum class Opcode : std::uint8_t {
  kSetMode = 0x01,
  kSetTarget = 0x02,
  kSetGains = 0x03,
  kFanCtl = 0x04,
  kTelemetryReq = 0x05,
  kTelemetryResp = 0x06,
};

enum class WireMode : std::uint8_t {
  kIdle = 0,
  kTorque = 1,
  kVelocityPid = 2,
  kPositionPid = 3,
};

enum class GainLoop : std::uint8_t { kVelocity = 0, kPosition = 1 };
enum class GainTerm : std::uint8_t {
  kKp = 0,
  kKi = 1,
  kKd = 2,
  kIntegralLimit = 3,
};

enum class Channel : std::uint8_t {
  kPosition = 0,
  kVelocity = 1,
  kTorque = 2,
  kCurrent = 3,
  kPackVoltage = 4,
  kStatorTemp = 5,
};

struct SetMode {
  WireMode mode = WireMode::kIdle;
  bool operator==(const SetMode&) const = default;
};

/// Target for the latched mode: N*m, rad/s or rad.
struct SetTarget {
  float target = 0.0f;
  bool operator==(const SetTarget&) const = default;
};

struct SetGains {
  GainLoop loop = GainLoop::kVelocity;
  GainTerm term = GainTerm::kKp;
  float value = 0.0f;
  bool operator==(const SetGains&) const = default;
};

struct FanCtl {
  bool on = false;
  bool operator==(const FanCtl&) const = default;
};

struct TelemetryReq {
  Channel channel = Channel::kPosition;
  bool operator==(const TelemetryReq&) const = default;
};

/// One telemetry channel. kStatorTemp travels as signed centi-degrees
/// Celsius; every other channel as a float.
struct TelemetryResp {
  Channel channel = Channel::kPosition;
  std::variant<float, std::int16_t> reading = 0.0f;
  bool operator==(const TelemetryResp&) const = default;
};

using Body =
    std::variant<SetMode, SetTarget, SetGains, FanCtl, TelemetryReq, TelemetryResp>;

struct RegisterMessage {
  MotorId motor = MotorId::kMotor1;
  Body body;

  Opcode opcode() const;
  bool operator==(const RegisterMessage&) const = default;
};

enum class DecodeError : std::uint8_t {
  kMalformedLength,
  kUnknownOpcode,
  kReservedId,
  kIdMismatch,
  kInvalidField,
};

std::string_view DecodeErrorName(DecodeError error);

/// Raised for messages that have no canonical encoding.
class EncodeError : public Error {
 public:
  explicit EncodeError(const std::string& message)
      : Error(ErrorCode::kProtocol, message) {}
};

Frame encode(const RegisterMessage& message);

using DecodeResult = std::variant<RegisterMessage, DecodeError>;

/// Total over all frames: returns a message or a classified error.
DecodeResult decode(const Frame& frame);

/// Converts degrees Celsius to the wire's centi-degree representation,
/// saturating at the int16 range.
std::int16_t ToCentiCelsius(double celsius);
double FromCentiCelsius(std::int16_t centi);

/// "101#0201000000803F" style rendering used by the golden fixture.
std::string ToCandump(const Frame& frame);
Frame FromCandump(std::string_view text);

}  // namespace tdu::codec
