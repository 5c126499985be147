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

#include "tdu/hal/sim_backend.h"

#include <cmath>
#include <string>
#include <thread>

namespace tdu::hal {

std::string_view DriveModeName(DriveMode mode) {
  switch (mode) {
    case DriveMode::kIdle: return "idle";
    case DriveMode::kTorque: return "torque";
    case DriveMode::kVelocityPid: return "velocity_pid";
    case DriveMode::kPositionPid: return "position_pid";
  }
  return "unknown";
}

void DriveSettings::Validate() const {
  velocity_gains.Validate();
  position_gains.Validate();
  if (!(max_velocity > 0.0)) {
    throw Error(ErrorCode::kConfig, "drive max_velocity must be positive");
  }
  if (!(telemetry_period > 0.0)) {
    throw Error(ErrorCode::kConfig, "drive telemetry_period must be positive");
  }
}

BackendKind ParseBackendKind(std::string_view name) {
  if (name == "sim") return BackendKind::kSim;
  if (name == "frame") return BackendKind::kFrame;
  throw Error(ErrorCode::kConfig,
              "unknown backend '" + std::string(name) + "' (expected sim or frame)");
}

std::string_view BackendKindName(BackendKind kind) {
  return kind == BackendKind::kSim ? "sim" : "frame";
}

void SensorNoise::Validate() const {
  if (!(tension >= 0.0 && temperature >= 0.0 && acoustic >= 0.0)) {
    throw Error(ErrorCode::kConfig, "sensor noise levels must be >= 0");
  }
}

SimBackend::SimBackend(sim::PlantParams params, DriveSettings settings,
                       SensorNoise noise, std::uint64_t seed, bool paced)
    : params_(std::move(params)),
      settings_(settings),
      noise_(noise),
      paced_(paced),
      plant_(params_),
      rng_(seed),
      wall_start_(std::chrono::steady_clock::now()) {
  settings_.Validate();
  noise_.Validate();
  for (auto& ch : channels_) {
    ch.velocity_gains = settings_.velocity_gains;
    ch.position_gains = settings_.position_gains;
  }
}

void SimBackend::Validate(const DriveCommand& cmd) const {
  const auto raw = static_cast<int>(cmd.motor);
  if (raw != 1 && raw != 2) {
    throw Error(ErrorCode::kUnknownMotor, "motor id " + std::to_string(raw));
  }
  if (!std::isfinite(cmd.target)) {
    throw Error(ErrorCode::kOutOfRange, "target must be finite");
  }
  const auto& p = params_.motor(cmd.motor);
  if (cmd.mode == DriveMode::kTorque && std::abs(cmd.target) > p.peak_torque) {
    throw Error(ErrorCode::kOutOfRange,
                "torque target " + std::to_string(cmd.target) +
                    " N*m exceeds peak " + std::to_string(p.peak_torque));
  }
  if (cmd.mode == DriveMode::kVelocityPid &&
      std::abs(cmd.target) > settings_.max_velocity) {
    throw Error(ErrorCode::kOutOfRange,
                "velocity target " + std::to_string(cmd.target) +
                    " rad/s exceeds " + std::to_string(settings_.max_velocity));
  }
}

Ack SimBackend::send_command(const DriveCommand& cmd) {
  Validate(cmd);
  {
    std::lock_guard lock(state_mutex_);
    if (fault_) throw Error(ErrorCode::kDriveFault, "drive is faulted");
    if (!plant_.state().powered && cmd.mode != DriveMode::kIdle) {
      throw Error(ErrorCode::kDriveFault, "pack below cutoff, drives unpowered");
    }
  }
  std::lock_guard lock(command_mutex_);
  pending_.push_back(cmd);
  return Ack{cmd.motor, cmd.mode, cmd.target};
}

void SimBackend::set_gains(MotorId motor, DriveMode loop, const PidGains& gains) {
  gains.Validate();
  std::lock_guard lock(state_mutex_);
  Channel& ch = channels_[Index(MotorIdFromInt(static_cast<int>(motor)))];
  if (loop == DriveMode::kVelocityPid) {
    ch.velocity_gains = gains;
  } else if (loop == DriveMode::kPositionPid) {
    ch.position_gains = gains;
  } else {
    throw Error(ErrorCode::kOutOfRange, "gains apply to the PID modes only");
  }
}

void SimBackend::Latch(const DriveCommand& cmd) {
  Channel& ch = channels_[Index(cmd.motor)];
  if (cmd.mode != ch.mode) {
    ch.velocity_pid = {};
    ch.position_pid = {};
  }
  ch.mode = cmd.mode;
  ch.target = cmd.mode == DriveMode::kIdle ? 0.0 : cmd.target;
}

double SimBackend::TorqueRequest(Channel& ch, const sim::MotorParams& p,
                                 const sim::MotorState& m) {
  const double dt = params_.dt;
  switch (ch.mode) {
    case DriveMode::kIdle:
      return 0.0;
    case DriveMode::kTorque:
      return ch.target;
    case DriveMode::kVelocityPid: {
      const auto r = pid_step(ch.target - m.velocity, ch.velocity_gains,
                              ch.velocity_pid, dt, p.peak_torque);
      ch.velocity_pid = r.state;
      return r.output;
    }
    case DriveMode::kPositionPid: {
      const auto outer = pid_step(ch.target - m.position, ch.position_gains,
                                  ch.position_pid, dt, settings_.max_velocity);
      ch.position_pid = outer.state;
      const auto inner = pid_step(outer.output - m.velocity, ch.velocity_gains,
                                  ch.velocity_pid, dt, p.peak_torque);
      ch.velocity_pid = inner.state;
      return inner.output;
    }
  }
  return 0.0;
}

void SimBackend::tick() {
  {
    std::lock_guard lock(command_mutex_);
    while (!pending_.empty()) {
      Latch(pending_.front());
      pending_.pop_front();
    }
  }
  {
    std::lock_guard lock(state_mutex_);
    if (fault_) throw Error(ErrorCode::kDriveFault, "drive is faulted");
    std::array<double, 2> commands{};
    const auto& s = plant_.state();
    for (std::size_t i = 0; i < 2; ++i) {
      commands[i] = TorqueRequest(channels_[i], params_.motors[i], s.motors[i]);
    }
    try {
      plant_.Step(commands);
    } catch (const Error& e) {
      fault_ = true;
      throw Error(ErrorCode::kDriveFault, e.what());
    }
    if (!plant_.state().powered) {
      for (auto& ch : channels_) ch.mode = DriveMode::kIdle;
    }
  }
  if (paced_) Pace();
}

void SimBackend::Pace() {
  const auto due = wall_start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                     std::chrono::duration<double>(now()));
  std::this_thread::sleep_until(due);
}

double SimBackend::now() const {
  std::lock_guard lock(state_mutex_);
  return plant_.state().sim_time;
}

double SimBackend::Gaussian(double sigma) {
  if (sigma == 0.0) return 0.0;
  return sigma * normal_(rng_);
}

TelemetrySample SimBackend::sample(MotorId motor) {
  std::lock_guard lock(state_mutex_);
  const auto& s = plant_.state();
  const auto& m = s.motor(MotorIdFromInt(static_cast<int>(motor)));
  const auto& p = params_.motor(motor);
  TelemetrySample out;
  out.t = s.sim_time;
  out.motor = motor;
  out.position = m.position;
  out.velocity = m.velocity;
  out.torque = m.applied_torque;
  out.current = m.applied_torque / p.kt;
  out.stator_temp = m.stator_temp + Gaussian(noise_.temperature);
  out.pack_voltage = s.pack_voltage;
  return out;
}

void SimBackend::set_fans(bool on) {
  std::lock_guard lock(state_mutex_);
  plant_.set_fans(on && plant_.state().powered);
}

void SimBackend::set_fixture(const sim::Fixture& fixture) {
  std::lock_guard lock(state_mutex_);
  plant_.set_fixture(fixture);
}

double SimBackend::read_tension(MotorId motor) {
  std::lock_guard lock(state_mutex_);
  const auto& m = plant_.state().motor(MotorIdFromInt(static_cast<int>(motor)));
  return m.cable_tension + Gaussian(noise_.tension);
}

void SimBackend::start_sound_meter() {
  std::lock_guard lock(state_mutex_);
  plant_.StartSoundMeter();
}

double SimBackend::read_sound_leq() {
  std::lock_guard lock(state_mutex_);
  return plant_.SoundMeterLeq() + Gaussian(noise_.acoustic);
}

void SimBackend::charge_pack() {
  std::lock_guard lock(state_mutex_);
  plant_.Recharge();
}

sim::PlantState SimBackend::state() const {
  std::lock_guard lock(state_mutex_);
  return plant_.state();
}

DriveMode SimBackend::mode(MotorId motor) const {
  std::lock_guard lock(state_mutex_);
  return channels_[Index(motor)].mode;
}

double SimBackend::last_power() const {
  std::lock_guard lock(state_mutex_);
  return plant_.last_power();
}

}  // namespace tdu::hal
