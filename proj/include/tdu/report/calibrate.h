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
#include <string>
#include <utility>
#include <vector>

#include "tdu/report/config.h"

namespace tdu::report {

/// Free parameters grouped by the targets that constrain them:
///   torque    torque_gain_m1 torque_offset_m1 torque_gain_m2 torque_offset_m2
///   battery   idle_power winding_resistance
///   thermal   heat_capacity r_th_fans_on r_th_fans_off
///   acoustic  fans_level motor_ref_level motor_slope
std::vector<std::string> KnownFreeParams();

struct CalibrationResidual {
  std::string target;
  double target_value = 0.0;
  double model_value = 0.0;
  double relative_error = 0.0;  // (model - target) / target
};

struct CalibrationResult {
  sim::PlantParams params;
  std::vector<std::pair<std::string, double>> fitted;
  std::vector<CalibrationResidual> residuals;
};

/// Least-squares fit of the selected parameters minimising relative error
/// to the configured targets, group by group (torque, battery, thermal,
/// acoustic). Battery and thermal predictions come from short noise-free
/// simulations of the protocol motion combined with the closed-form energy
/// and first-order thermal responses.
///
/// Throws kCalibration for unknown names, non-positive starting values, or
/// a group with more free parameters than targets. With no free parameters
/// the plant is returned unchanged with residuals for every group.
CalibrationResult Calibrate(const ToolkitConfig& config,
                            const std::vector<std::string>& free_params);

/// Model predictions used by Calibrate, exposed for testing.
struct BatteryDraw {
  double load = 0.0;
  double mechanical = 0.0;  // W, mean positive shaft power, both motors
  std::array<double, 2> current_sq{};  // A^2, mean squared phase current
};
std::vector<BatteryDraw> SimulateBatteryDraw(const ToolkitConfig& config);
/// Mean squared phase current per motor on the thermal rig, A^2.
std::array<double, 2> SimulateThermalCurrent(const ToolkitConfig& config);

}  // namespace tdu::report
