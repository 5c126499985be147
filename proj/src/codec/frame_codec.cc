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

#include "tdu/codec/frame_codec.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

namespace tdu::codec {
namespace {

// Body length per opcode, excluding the two header bytes.
constexpr std::size_t BodyLength(Opcode op, Channel channel = Channel::kPosition) {
  switch (op) {
    case Opcode::kSetMode: return 1;
    case Opcode::kSetTarget: return 4;
    case Opcode::kSetGains: return 5;
    case Opcode::kFanCtl: return 1;
    case Opcode::kTelemetryReq: return 1;
    case Opcode::kTelemetryResp: return channel == Channel::kStatorTemp ? 3 : 5;
  }
  return 0;
}

class BodyWriter {
 public:
  explicit BodyWriter(Frame& frame) : frame_(frame) {}

  void U8(std::uint8_t v) {
    Reserve(1);
    frame_.data[frame_.dlc++] = v;
  }

  void F32(float v) {
    if (!std::isfinite(v)) throw EncodeError("non-finite float in message body");
    const auto bits = std::bit_cast<std::uint32_t>(v);
    Reserve(4);
    for (int i = 0; i < 4; ++i) frame_.data[frame_.dlc++] = (bits >> (8 * i)) & 0xFF;
  }

  void I16(std::int16_t v) {
    const auto bits = static_cast<std::uint16_t>(v);
    Reserve(2);
    frame_.data[frame_.dlc++] = bits & 0xFF;
    frame_.data[frame_.dlc++] = bits >> 8;
  }

 private:
  void Reserve(std::size_t n) {
    if (frame_.dlc + n > 2 + kMaxBody) {
      throw EncodeError("message body exceeds 6 bytes");
    }
  }

  Frame& frame_;
};

float ReadF32(std::span<const std::uint8_t> p, std::size_t at) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[at + i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

std::int16_t ReadI16(std::span<const std::uint8_t> p, std::size_t at) {
  const std::uint16_t bits = p[at] | (static_cast<std::uint16_t>(p[at + 1]) << 8);
  return static_cast<std::int16_t>(bits);
}

bool KnownOpcode(std::uint8_t v) { return v >= 0x01 && v <= 0x06; }

}  // namespace

bool Frame::operator==(const Frame& other) const {
  return id == other.id && dlc == other.dlc &&
         std::equal(data.begin(), data.begin() + std::min<std::size_t>(dlc, 8),
                    other.data.begin());
}

Opcode RegisterMessage::opcode() const {
  return std::visit(
      [](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, SetMode>) return Opcode::kSetMode;
        if constexpr (std::is_same_v<T, SetTarget>) return Opcode::kSetTarget;
        if constexpr (std::is_same_v<T, SetGains>) return Opcode::kSetGains;
        if constexpr (std::is_same_v<T, FanCtl>) return Opcode::kFanCtl;
        if constexpr (std::is_same_v<T, TelemetryReq>) return Opcode::kTelemetryReq;
        if constexpr (std::is_same_v<T, TelemetryResp>) return Opcode::kTelemetryResp;
      },
      body);
}

std::string_view DecodeErrorName(DecodeError error) {
  switch (error) {
    case DecodeError::kMalformedLength: return "malformed_length";
    case DecodeError::kUnknownOpcode: return "unknown_opcode";
    case DecodeError::kReservedId: return "reserved_id";
    case DecodeError::kIdMismatch: return "id_mismatch";
    case DecodeError::kInvalidField: return "invalid_field";
  }
  return "unknown";
}

Frame encode(const RegisterMessage& message) {
  const auto motor = static_cast<std::uint8_t>(message.motor);
  if (motor != 1 && motor != 2) throw EncodeError("motor id must be 1 or 2");

  Frame frame;
  frame.id = kBaseId + motor;
  BodyWriter w(frame);
  w.U8(static_cast<std::uint8_t>(message.opcode()));
  w.U8(motor);

  std::visit(
      [&w](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, SetMode>) {
          if (static_cast<std::uint8_t>(b.mode) > 3) throw EncodeError("invalid mode");
          w.U8(static_cast<std::uint8_t>(b.mode));
        } else if constexpr (std::is_same_v<T, SetTarget>) {
          w.F32(b.target);
        } else if constexpr (std::is_same_v<T, SetGains>) {
          const auto loop = static_cast<std::uint8_t>(b.loop);
          const auto term = static_cast<std::uint8_t>(b.term);
          if (loop > 1 || term > 3) throw EncodeError("invalid gain selector");
          w.U8(static_cast<std::uint8_t>((loop << 4) | term));
          w.F32(b.value);
        } else if constexpr (std::is_same_v<T, FanCtl>) {
          w.U8(b.on ? 1 : 0);
        } else if constexpr (std::is_same_v<T, TelemetryReq>) {
          if (static_cast<std::uint8_t>(b.channel) > 5) throw EncodeError("invalid channel");
          w.U8(static_cast<std::uint8_t>(b.channel));
        } else if constexpr (std::is_same_v<T, TelemetryResp>) {
          const bool temp = b.channel == Channel::kStatorTemp;
          if (static_cast<std::uint8_t>(b.channel) > 5) throw EncodeError("invalid channel");
          if (temp != std::holds_alternative<std::int16_t>(b.reading)) {
            throw EncodeError("stator temperature must travel as centi-degrees");
          }
          w.U8(static_cast<std::uint8_t>(b.channel));
          if (temp) {
            w.I16(std::get<std::int16_t>(b.reading));
          } else {
            w.F32(std::get<float>(b.reading));
          }
        }
      },
      message.body);
  return frame;
}

DecodeResult decode(const Frame& frame) {
  if (frame.id != kBaseId + 1 && frame.id != kBaseId + 2) {
    return DecodeError::kReservedId;
  }
  if (frame.dlc < 2 || frame.dlc > 8) return DecodeError::kMalformedLength;
  const auto p = frame.payload();
  if (!KnownOpcode(p[0])) return DecodeError::kUnknownOpcode;
  const auto op = static_cast<Opcode>(p[0]);
  if (p[1] != frame.id - kBaseId) return DecodeError::kIdMismatch;

  RegisterMessage msg;
  msg.motor = static_cast<MotorId>(p[1]);
  const std::size_t body = frame.dlc - 2;

  if (op == Opcode::kTelemetryResp) {
    if (body < 1) return DecodeError::kMalformedLength;
    if (p[2] > 5) return DecodeError::kInvalidField;
    const auto channel = static_cast<Channel>(p[2]);
    if (body != BodyLength(op, channel)) return DecodeError::kMalformedLength;
    TelemetryResp resp{channel, 0.0f};
    if (channel == Channel::kStatorTemp) {
      resp.reading = ReadI16(p, 3);
    } else {
      const float v = ReadF32(p, 3);
      if (!std::isfinite(v)) return DecodeError::kInvalidField;
      resp.reading = v;
    }
    msg.body = resp;
    return msg;
  }

  if (body != BodyLength(op)) return DecodeError::kMalformedLength;
  switch (op) {
    case Opcode::kSetMode:
      if (p[2] > 3) return DecodeError::kInvalidField;
      msg.body = SetMode{static_cast<WireMode>(p[2])};
      break;
    case Opcode::kSetTarget: {
      const float v = ReadF32(p, 2);
      if (!std::isfinite(v)) return DecodeError::kInvalidField;
      msg.body = SetTarget{v};
      break;
    }
    case Opcode::kSetGains: {
      const std::uint8_t loop = p[2] >> 4;
      const std::uint8_t term = p[2] & 0x0F;
      const float v = ReadF32(p, 3);
      if (loop > 1 || term > 3 || !std::isfinite(v)) return DecodeError::kInvalidField;
      msg.body = SetGains{static_cast<GainLoop>(loop), static_cast<GainTerm>(term), v};
      break;
    }
    case Opcode::kFanCtl:
      if (p[2] > 1) return DecodeError::kInvalidField;
      msg.body = FanCtl{p[2] == 1};
      break;
    case Opcode::kTelemetryReq:
      if (p[2] > 5) return DecodeError::kInvalidField;
      msg.body = TelemetryReq{static_cast<Channel>(p[2])};
      break;
    case Opcode::kTelemetryResp:
      break;
  }
  return msg;
}

std::int16_t ToCentiCelsius(double celsius) {
  const double centi = std::round(celsius * 100.0);
  constexpr double lo = std::numeric_limits<std::int16_t>::min();
  constexpr double hi = std::numeric_limits<std::int16_t>::max();
  if (!(centi >= lo)) return std::numeric_limits<std::int16_t>::min();
  if (centi > hi) return std::numeric_limits<std::int16_t>::max();
  return static_cast<std::int16_t>(centi);
}

double FromCentiCelsius(std::int16_t centi) { return centi / 100.0; }

std::string ToCandump(const Frame& frame) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out += kHex[(frame.id >> 8) & 0xF];
  out += kHex[(frame.id >> 4) & 0xF];
  out += kHex[frame.id & 0xF];
  out += '#';
  for (std::uint8_t b : frame.payload()) {
    out += kHex[b >> 4];
    out += kHex[b & 0xF];
  }
  return out;
}

Frame FromCandump(std::string_view text) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw Error(ErrorCode::kProtocol, std::string("bad hex digit '") + c + "'");
  };
  const auto hash = text.find('#');
  if (hash == std::string_view::npos || hash == 0 || hash > 3) {
    throw Error(ErrorCode::kProtocol, "candump frame needs 'ID#DATA'");
  }
  Frame frame;
  for (char c : text.substr(0, hash)) frame.id = (frame.id << 4) | nibble(c);
  const auto hex = text.substr(hash + 1);
  if (hex.size() % 2 != 0 || hex.size() > 16) {
    throw Error(ErrorCode::kProtocol, "candump data must be 0..8 whole bytes");
  }
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    frame.data[frame.dlc++] = (nibble(hex[i]) << 4) | nibble(hex[i + 1]);
  }
  return frame;
}

}  // namespace tdu::codec
