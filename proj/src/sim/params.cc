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

#include "tdu/sim/params.h"

#include <cmath>
#include <string>

namespace tdu::sim {
namespace {

void Require(bool condition, const std::string& what) {
  if (!condition) throw Error(ErrorCode::kConfig, what);
}

bool Finite(double x) { return std::isfinite(x); }

}  // namespace

void MotorParams::Validate() const {
  Require(Finite(kt) && kt > 0.0, "motor kt must be positive");
  Require(rated_torque > 0.0 && rated_torque <= peak_torque,
          "motor torque limits require 0 < rated_torque <= peak_torque");
  Require(torque_gain > 0.0 && torque_gain <= 1.2,
          "motor torque_gain must lie in (0, 1.2]");
  Require(torque_offset >= 0.0, "motor torque_offset must be >= 0");
  Require(stiction >= 0.0, "motor stiction must be >= 0");
  Require(cogging_amplitude >= 0.0, "motor cogging_amplitude must be >= 0");
  Require(cogging_cycles_per_rev >= 0,
          "motor cogging_cycles_per_rev must be >= 0");
  Require(rotor_inertia > 0.0, "motor rotor_inertia must be positive");
  Require(viscous_friction >= 0.0, "motor viscous_friction must be >= 0");
  Require(winding_resistance >= 0.0, "motor winding_resistance must be >= 0");
}

void ThermalParams::Validate() const {
  Require(heat_capacity > 0.0, "thermal heat_capacity must be positive");
  Require(r_th_fans_on > 0.0 && r_th_fans_off > 0.0,
          "thermal resistances must be positive");
  Require(r_th_fans_on < r_th_fans_off,
          "thermal r_th_fans_on must be below r_th_fans_off");
  Require(Finite(ambient), "thermal ambient must be finite");
}

double BatteryParams::VoltageAt(double soc) const {
  const auto& curve = soc_voltage_curve;
  if (soc <= curve.front().soc) return curve.front().voltage;
  if (soc >= curve.back().soc) return curve.back().voltage;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (soc <= curve[i].soc) {
      const auto& lo = curve[i - 1];
      const auto& hi = curve[i];
      const double f = (soc - lo.soc) / (hi.soc - lo.soc);
      return lo.voltage + f * (hi.voltage - lo.voltage);
    }
  }
  return curve.back().voltage;
}

void BatteryParams::Validate() const {
  Require(full_voltage > cutoff_voltage,
          "battery full_voltage must exceed cutoff_voltage");
  Require(usable_energy > 0.0, "battery usable_energy must be positive");
  Require(idle_power > 0.0, "battery idle_power must be positive");
  Require(soc_voltage_curve.size() >= 2,
          "battery soc_voltage_curve needs at least two points");
  Require(soc_voltage_curve.front().soc == 0.0 &&
              soc_voltage_curve.front().voltage == cutoff_voltage,
          "battery soc_voltage_curve must start at (0, cutoff_voltage)");
  Require(soc_voltage_curve.back().soc == 1.0 &&
              soc_voltage_curve.back().voltage == full_voltage,
          "battery soc_voltage_curve must end at (1, full_voltage)");
  for (std::size_t i = 1; i < soc_voltage_curve.size(); ++i) {
    Require(soc_voltage_curve[i].soc > soc_voltage_curve[i - 1].soc &&
                soc_voltage_curve[i].voltage > soc_voltage_curve[i - 1].voltage,
            "battery soc_voltage_curve must be strictly increasing");
  }
}

void AcousticParams::Validate() const {
  Require(fans_level > room_floor, "acoustic fans_level must exceed room_floor");
  Require(motor_slope >= 0.0, "acoustic motor_slope must be >= 0");
  Require(motor_ref_speed > 0.0, "acoustic motor_ref_speed must be positive");
}

std::array<MotorParams, 2> PlantParams::DefaultMotors() {
  MotorParams left;
  MotorParams right;
  right.torque_gain = 0.938;
  return {left, right};
}

void PlantParams::Validate() const {
  for (const auto& m : motors) m.Validate();
  thermal.Validate();
  battery.Validate();
  acoustic.Validate();
  Require(pulley_radius > 0.0, "plant pulley_radius must be positive");
  Require(gravity > 0.0, "plant gravity must be positive");
  Require(redirect_friction >= 0.0 && redirect_friction < 1.0,
          "plant redirect_friction must lie in [0, 1)");
  Require(cable_stiffness > 0.0 && cable_damping >= 0.0,
          "plant cable stiffness must be positive and damping >= 0");
  Require(dt > 0.0 && dt <= 0.01, "plant dt must lie in (0, 10 ms]");
}

}  // namespace tdu::sim
