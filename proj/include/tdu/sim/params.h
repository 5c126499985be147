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

#include <array>
#include <numbers>
#include <utility>
#include <vector>

#include "tdu/common/error.h"

namespace tdu::sim {

/// Torque constant implied by a KV rating: kt = 60 / (2 pi KV), N*m/A.
constexpr double TorqueConstantFromKv(double kv) {
  return 60.0 / (2.0 * std::numbers::pi * kv);
}

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

/// Electromechanical constants of one direct-drive motor and its drive.
///
/// The torque map delivers sign(cmd) * max(0, torque_gain * |cmd| -
/// torque_offset). The default gain is the left motor's; the right motor
/// ships with 0.938.
struct MotorParams {
  double kt = TorqueConstantFromKv(95.0);  // N*m/A
  double rated_torque = 1.5;                // N*m
  double peak_torque = 3.0;                 // N*m
  double torque_gain = 0.915;
  double torque_offset = 0.120;             // N*m
  double stiction = 0.0;                    // N*m, rotor breakaway friction
  double cogging_amplitude = 0.05;          // N*m
  int cogging_cycles_per_rev = 42;
  double rotor_inertia = 7.0e-4;            // kg*m^2
  double viscous_friction = 1.0e-3;         // N*m*s/rad
  double winding_resistance = 0.15;         // ohm

  void Validate() const;
};

/// Single-node stator model: C dT/dt = P - (T - ambient) / R_th.
struct ThermalParams {
  double heat_capacity = 125.644045;  // J/K
  double r_th_fans_on = 3.26421794;   // K/W
  double r_th_fans_off = 16.4153611;  // K/W
  double ambient = 23.0;              // degC

  double TimeConstant(bool fans_on) const {
    return heat_capacity * (fans_on ? r_th_fans_on : r_th_fans_off);
  }

  void Validate() const;
};

struct SocVoltagePoint {
  double soc;
  double voltage;

  bool operator==(const SocVoltagePoint&) const = default;
};

struct BatteryParams {
  double full_voltage = 29.1;      // V
  double cutoff_voltage = 17.5;    // V
  double usable_energy = 90.72;    // W*h between full and cutoff
  double idle_power = 8.0;         // W, controller + fans with motors disabled
  /// Ascending in SOC; first point is (0, cutoff), last is (1, full).
  std::vector<SocVoltagePoint> soc_voltage_curve = {{0.0, 17.5}, {1.0, 29.1}};

  double VoltageAt(double soc) const;

  void Validate() const;
};

/// Free-field levels at the virtual microphone.
struct AcousticParams {
  double room_floor = 25.0;              // dB, TDU off
  double fans_level = 43.7;              // dB, fan bank alone
  double motor_ref_level = 49.733471;    // dB, one motor at motor_ref_speed
  double motor_ref_speed = 5.0;          // rad/s
  double motor_slope = 10.636072;        // dB per decade of speed

  void Validate() const;
};

struct PlantParams {
  std::array<MotorParams, 2> motors = DefaultMotors();
  ThermalParams thermal;
  BatteryParams battery;
  AcousticParams acoustic;
  double pulley_radius = 0.015;      // m, 30 mm pulley
  double gravity = kStandardGravity;
  double redirect_friction = 0.0;    // fraction of cable tension
  double cable_stiffness = 2.0e4;    // N/m, motor-to-motor tendon
  double cable_damping = 150.0;      // N*s/m
  double dt = 1.0e-3;                // s

  static std::array<MotorParams, 2> DefaultMotors();

  const MotorParams& motor(MotorId id) const { return motors[Index(id)]; }
  MotorParams& motor(MotorId id) { return motors[Index(id)]; }

  /// Throws ErrorCode::kConfig naming the first violated invariant.
  void Validate() const;
};

}  // namespace tdu::sim
