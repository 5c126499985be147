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

#include "tdu/hal/frame_backend.h"

#include <bitset>
#include <cmath>
#include <string>

namespace tdu::hal {
namespace {

using codec::Channel;
using codec::WireMode;

constexpr Channel kChannels[] = {
    Channel::kPosition, Channel::kVelocity,    Channel::kTorque,
    Channel::kCurrent,  Channel::kPackVoltage, Channel::kStatorTemp,
};

DriveMode FromWire(WireMode mode) { return static_cast<DriveMode>(mode); }
WireMode ToWire(DriveMode mode) { return static_cast<WireMode>(mode); }

void SetTerm(PidGains& gains, codec::GainTerm term, double value) {
  switch (term) {
    case codec::GainTerm::kKp: gains.kp = value; break;
    case codec::GainTerm::kKi: gains.ki = value; break;
    case codec::GainTerm::kKd: gains.kd = value; break;
    case codec::GainTerm::kIntegralLimit: gains.integral_limit = value; break;
  }
}

}  // namespace

DriveEmulator::DriveEmulator(SimBackend& drive) : drive_(drive) {
  velocity_gains_.fill(drive.settings().velocity_gains);
  position_gains_.fill(drive.settings().position_gains);
}

void DriveEmulator::Handle(const codec::Frame& frame,
                           std::deque<codec::Frame>& replies) {
  const auto decoded = codec::decode(frame);
  if (const auto* msg = std::get_if<codec::RegisterMessage>(&decoded)) {
    try {
      Apply(*msg, replies);
    } catch (const Error&) {
      ++rejected_;
    }
  } else {
    ++rejected_;
  }
}

void DriveEmulator::Apply(const codec::RegisterMessage& msg,
                          std::deque<codec::Frame>& replies) {
  const MotorId motor = msg.motor;
  const std::size_t i = Index(motor);
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, codec::SetMode>) {
          staged_[i] = FromWire(body.mode);
        } else if constexpr (std::is_same_v<T, codec::SetTarget>) {
          drive_.send_command(
              DriveCommand{motor, staged_[i], static_cast<double>(body.target),
                           drive_.now()});
        } else if constexpr (std::is_same_v<T, codec::SetGains>) {
          const bool velocity = body.loop == codec::GainLoop::kVelocity;
          PidGains next = velocity ? velocity_gains_[i] : position_gains_[i];
          SetTerm(next, body.term, body.value);
          drive_.set_gains(motor,
                           velocity ? DriveMode::kVelocityPid : DriveMode::kPositionPid,
                           next);
          (velocity ? velocity_gains_[i] : position_gains_[i]) = next;
        } else if constexpr (std::is_same_v<T, codec::FanCtl>) {
          drive_.set_fans(body.on);
        } else if constexpr (std::is_same_v<T, codec::TelemetryReq>) {
          const TelemetrySample s = drive_.sample(motor);
          codec::TelemetryResp resp{body.channel, 0.0f};
          switch (body.channel) {
            case Channel::kPosition: resp.reading = static_cast<float>(s.position); break;
            case Channel::kVelocity: resp.reading = static_cast<float>(s.velocity); break;
            case Channel::kTorque: resp.reading = static_cast<float>(s.torque); break;
            case Channel::kCurrent: resp.reading = static_cast<float>(s.current); break;
            case Channel::kPackVoltage:
              resp.reading = static_cast<float>(s.pack_voltage);
              break;
            case Channel::kStatorTemp:
              resp.reading = codec::ToCentiCelsius(s.stator_temp);
              break;
          }
          replies.push_back(codec::encode({motor, resp}));
        } else {
          // Responses are drive-to-host only.
          throw Error(ErrorCode::kProtocol, "unexpected telemetry response");
        }
      },
      msg.body);
}

LoopbackLink::LoopbackLink(SimBackend& drive) : drive_(drive), emulator_(drive) {}

void LoopbackLink::transmit(const codec::Frame& frame) {
  if (drop_ > 0) {
    --drop_;
    return;
  }
  emulator_.Handle(frame, rx_);
}

std::optional<codec::Frame> LoopbackLink::receive() {
  if (rx_.empty()) return std::nullopt;
  codec::Frame f = rx_.front();
  rx_.pop_front();
  return f;
}

FrameBackend::FrameBackend(FrameLink& link, DriveLimits limits)
    : link_(link), limits_(limits) {}

void FrameBackend::Send(MotorId motor, codec::Body body) {
  link_.transmit(codec::encode({motor, std::move(body)}));
}

Ack FrameBackend::send_command(const DriveCommand& cmd) {
  const MotorId motor = MotorIdFromInt(static_cast<int>(cmd.motor));
  if (!std::isfinite(cmd.target)) {
    throw Error(ErrorCode::kOutOfRange, "target must be finite");
  }
  if (cmd.mode == DriveMode::kTorque &&
      std::abs(cmd.target) > limits_.peak_torque[Index(motor)]) {
    throw Error(ErrorCode::kOutOfRange,
                "torque target " + std::to_string(cmd.target) + " N*m exceeds peak");
  }
  if (cmd.mode == DriveMode::kVelocityPid &&
      std::abs(cmd.target) > limits_.max_velocity) {
    throw Error(ErrorCode::kOutOfRange,
                "velocity target " + std::to_string(cmd.target) + " rad/s exceeds limit");
  }
  const float target =
      cmd.mode == DriveMode::kIdle ? 0.0f : static_cast<float>(cmd.target);
  Send(motor, codec::SetMode{ToWire(cmd.mode)});
  Send(motor, codec::SetTarget{target});
  return Ack{motor, cmd.mode, static_cast<double>(target)};
}

void FrameBackend::set_gains(MotorId motor, DriveMode loop, const PidGains& gains) {
  gains.Validate();
  motor = MotorIdFromInt(static_cast<int>(motor));
  codec::GainLoop wire_loop;
  if (loop == DriveMode::kVelocityPid) {
    wire_loop = codec::GainLoop::kVelocity;
  } else if (loop == DriveMode::kPositionPid) {
    wire_loop = codec::GainLoop::kPosition;
  } else {
    throw Error(ErrorCode::kOutOfRange, "gains apply to the PID modes only");
  }
  Send(motor, codec::SetGains{wire_loop, codec::GainTerm::kIntegralLimit,
                              static_cast<float>(gains.integral_limit)});
  Send(motor, codec::SetGains{wire_loop, codec::GainTerm::kKp, static_cast<float>(gains.kp)});
  Send(motor, codec::SetGains{wire_loop, codec::GainTerm::kKi, static_cast<float>(gains.ki)});
  Send(motor, codec::SetGains{wire_loop, codec::GainTerm::kKd, static_cast<float>(gains.kd)});
}

TelemetrySample FrameBackend::sample(MotorId motor) {
  motor = MotorIdFromInt(static_cast<int>(motor));
  for (Channel c : kChannels) Send(motor, codec::TelemetryReq{c});

  TelemetrySample out;
  out.t = link_.now();
  out.motor = motor;
  std::bitset<6> seen;
  while (auto frame = link_.receive()) {
    const auto decoded = codec::decode(*frame);
    const auto* msg = std::get_if<codec::RegisterMessage>(&decoded);
    if (msg == nullptr || msg->motor != motor) continue;
    const auto* resp = std::get_if<codec::TelemetryResp>(&msg->body);
    if (resp == nullptr) continue;
    double value = 0.0;
    if (const auto* f = std::get_if<float>(&resp->reading)) {
      value = *f;
    } else {
      value = codec::FromCentiCelsius(std::get<std::int16_t>(resp->reading));
    }
    switch (resp->channel) {
      case Channel::kPosition: out.position = value; break;
      case Channel::kVelocity: out.velocity = value; break;
      case Channel::kTorque: out.torque = value; break;
      case Channel::kCurrent: out.current = value; break;
      case Channel::kPackVoltage: out.pack_voltage = value; break;
      case Channel::kStatorTemp: out.stator_temp = value; break;
    }
    seen.set(static_cast<std::size_t>(resp->channel));
  }
  if (!seen.all()) {
    throw Error(ErrorCode::kBackendTimeout,
                "telemetry incomplete for motor " +
                    std::to_string(static_cast<int>(motor)) + ": " +
                    std::to_string(6 - seen.count()) + " channel(s) missing");
  }
  return out;
}

void FrameBackend::set_fans(bool on) { Send(MotorId::kMotor1, codec::FanCtl{on}); }

FrameRig MakeFrameRig(sim::PlantParams params, DriveSettings settings,
                      SensorNoise noise, std::uint64_t seed, bool paced) {
  FrameRig rig;
  DriveLimits limits;
  for (MotorId m : kMotors) limits.peak_torque[Index(m)] = params.motor(m).peak_torque;
  limits.max_velocity = settings.max_velocity;
  rig.sim = std::make_unique<SimBackend>(std::move(params), settings, noise, seed, paced);
  rig.link = std::make_unique<LoopbackLink>(*rig.sim);
  rig.drive = std::make_unique<FrameBackend>(*rig.link, limits);
  return rig;
}

}  // namespace tdu::hal
