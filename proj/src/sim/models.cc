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

#include "tdu/sim/models.h"

#include <algorithm>
#include <cmath>

namespace tdu::sim {

TorqueResult applied_torque(double cmd, const MotorParams& params) {
  TorqueResult result;
  double magnitude = std::abs(cmd);
  if (magnitude > params.peak_torque) {
    magnitude = params.peak_torque;
    result.saturated = true;
  }
  const double delivered =
      std::max(0.0, params.torque_gain * magnitude - params.torque_offset);
  result.torque = std::min(delivered, params.peak_torque);
  if (cmd < 0.0) result.torque = -result.torque;
  return result;
}

double cable_tension(double torque, double pulley_radius) {
  if (!(pulley_radius > 0.0)) {
    throw Error(ErrorCode::kConfig, "pulley radius must be positive");
  }
  return torque / pulley_radius;
}

double thermal_step(double temp, double electrical_loss,
                    const ThermalParams& params, bool fans_on, double dt) {
  const double r_th = fans_on ? params.r_th_fans_on : params.r_th_fans_off;
  const double steady = params.ambient + electrical_loss * r_th;
  const double decay = std::exp(-dt / (params.heat_capacity * r_th));
  return steady + (temp - steady) * decay;
}

double copper_loss(double torque, const MotorParams& params) {
  const double current = torque / params.kt;
  return current * current * params.winding_resistance;
}

double electrical_power(std::span<const double> torques,
                        std::span<const double> speeds,
                        std::span<const MotorParams> motors,
                        double idle_power) {
  double power = idle_power;
  for (std::size_t i = 0; i < torques.size(); ++i) {
    power += std::max(torques[i] * speeds[i], 0.0);
    power += copper_loss(torques[i], motors[i]);
  }
  return power;
}

BatteryStepResult battery_step(double soc, double power, double dt,
                               const BatteryParams& params) {
  BatteryStepResult result;
  const double energy_joules = params.usable_energy * 3600.0;
  result.soc = std::max(0.0, soc - power * dt / energy_joules);
  result.voltage = params.VoltageAt(result.soc);
  result.depleted = result.voltage <= params.cutoff_voltage;
  return result;
}

double motor_source_level(double speed, const AcousticParams& params) {
  return params.motor_ref_level +
         params.motor_slope * std::log10(speed / params.motor_ref_speed);
}

double sound_level(std::span<const double> speeds, bool fans_on,
                   const AcousticParams& params) {
  double energy = std::pow(10.0, params.room_floor / 10.0);
  if (fans_on) energy += std::pow(10.0, params.fans_level / 10.0);
  for (double speed : speeds) {
    if (speed > 0.0) {
      energy += std::pow(10.0, motor_source_level(speed, params) / 10.0);
    }
  }
  return 10.0 * std::log10(energy);
}

double cogging_torque(double position, const MotorParams& params) {
  if (params.cogging_amplitude == 0.0) return 0.0;
  return params.cogging_amplitude *
         std::sin(params.cogging_cycles_per_rev * position);
}

}  // namespace tdu::sim
