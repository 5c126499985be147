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
#include <span>

#include "tdu/sim/params.h"

namespace tdu::sim {

struct TorqueResult {
  double torque = 0.0;     // N*m delivered at the rotor
  bool saturated = false;  // command exceeded peak_torque and was clamped
};

/// Static torque map of the drive: sign(cmd) * max(0, a|cmd| - b), with the
/// command clamped to +/- peak_torque first.
TorqueResult applied_torque(double cmd, const MotorParams& params);

/// Tension in a cable wound on a pulley of the given radius.
double cable_tension(double torque, double pulley_radius);

/// Exact exponential update of the single-node stator model over dt.
double thermal_step(double temp, double electrical_loss,
                    const ThermalParams& params, bool fans_on, double dt);

/// Copper loss of one winding carrying the current for `torque`.
double copper_loss(double torque, const MotorParams& params);

/// Pack draw: idle_power plus, per motor, positive mechanical power and
/// copper loss. Negative mechanical power is not recovered.
double electrical_power(std::span<const double> torques,
                        std::span<const double> speeds,
                        std::span<const MotorParams> motors,
                        double idle_power);

struct BatteryStepResult {
  double soc = 1.0;
  double voltage = 0.0;
  bool depleted = false;
};

BatteryStepResult battery_step(double soc, double power, double dt,
                               const BatteryParams& params);

/// Level at the virtual microphone: room floor, fan bank when on, and one
/// source per spinning motor, summed energetically.
double sound_level(std::span<const double> speeds, bool fans_on,
                   const AcousticParams& params);

/// Source level of one motor spinning at `speed` (rad/s, > 0).
double motor_source_level(double speed, const AcousticParams& params);

double cogging_torque(double position, const MotorParams& params);

}  // namespace tdu::sim
