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
#include <string_view>

#include "tdu/common/error.h"
#include "tdu/hal/pid.h"
#include "tdu/sim/plant.h"

namespace tdu::hal {

enum class DriveMode : std::uint8_t {
  kIdle = 0,
  kTorque = 1,
  kVelocityPid = 2,
  kPositionPid = 3,
};

std::string_view DriveModeName(DriveMode mode);

/// Setpoint for one drive. `target` is N*m, rad/s or rad depending on the
/// mode and is ignored in kIdle.
struct DriveCommand {
  MotorId motor = MotorId::kMotor1;
  DriveMode mode = DriveMode::kIdle;
  double target = 0.0;
  double timestamp = 0.0;  // s, host time the command was issued
};

struct Ack {
  MotorId motor = MotorId::kMotor1;
  DriveMode mode = DriveMode::kIdle;
  double target = 0.0;
};

struct TelemetrySample {
  double t = 0.0;  // s
  MotorId motor = MotorId::kMotor1;
  double position = 0.0;     // rad
  double velocity = 0.0;     // rad/s
  double torque = 0.0;       // N*m, phase-current estimate
  double current = 0.0;      // A
  double stator_temp = 0.0;  // degC, NTC reading
  double pack_voltage = 0.0; // V
};

/// Controller configuration shared by every backend.
struct DriveSettings {
  PidGains velocity_gains{0.06, 0.9, 0.0, 2.5};    // N*m per rad/s
  PidGains position_gains{20.0, 0.0, 0.0, 10.0};   // rad/s per rad
  double max_velocity = 100.0;                     // rad/s
  double telemetry_period = 0.01;                  // s

  void Validate() const;
};

/// Backend-agnostic interface to the two motor drives of a TDU.
///
/// Errors are reported as tdu::Error with kUnknownMotor, kOutOfRange,
/// kDriveFault or kBackendTimeout.
class Drive {
 public:
  virtual ~Drive() = default;

  /// Latches mode and target; the pair takes effect together on the next
  /// control step. Out-of-range targets leave the drive unchanged.
  virtual Ack send_command(const DriveCommand& cmd) = 0;

  virtual void set_gains(MotorId motor, DriveMode loop, const PidGains& gains) = 0;

  virtual TelemetrySample sample(MotorId motor) = 0;

  virtual void set_fans(bool on) = 0;

  /// Advances one control period.
  virtual void tick() = 0;

  virtual double now() const = 0;
  virtual double control_period() const = 0;
  virtual std::string_view backend_id() const = 0;
};

/// The rig around the TDU: fixture and external instruments.
class Bench {
 public:
  virtual ~Bench() = default;

  virtual void set_fixture(const sim::Fixture& fixture) = 0;

  /// Crane-scale reading of the cable on `motor`'s pulley, N.
  virtual double read_tension(MotorId motor) = 0;

  virtual void start_sound_meter() = 0;

  /// Equivalent continuous level since start_sound_meter(), dB.
  virtual double read_sound_leq() = 0;

  /// Operator recharge of the pack to full voltage.
  virtual void charge_pack() = 0;
};

/// Resolves a backend selection string; throws kConfig for anything but
/// "sim" or "frame".
enum class BackendKind : std::uint8_t { kSim, kFrame };
BackendKind ParseBackendKind(std::string_view name);
std::string_view BackendKindName(BackendKind kind);

}  // namespace tdu::hal
