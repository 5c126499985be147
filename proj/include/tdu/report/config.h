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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdu/hal/sim_backend.h"
#include "tdu/orchestrator/protocols.h"
#include "tdu/sim/params.h"

namespace tdu::report {

/// Published figures the model is fitted against.
struct CalibrationTargets {
  /// (load kg, runtime s); 0 kg is the idle condition.
  std::vector<std::pair<double, double>> runtimes{
      {0.0, 40823.0}, {2.0, 29171.0}, {4.0, 16774.0}, {6.0, 9500.0}};
  double rise_fans_off = 300.0;        // s, 30 -> 80 degC
  double rise_fans_on = 520.0;         // s, 30 -> 80 degC
  double fall_fans_on = 850.0;         // s, 80 -> 30 degC
  double fall_fans_off_to_40 = 2500.0; // s, 80 -> 40 degC
  double fans_only_db = 43.7;
  double single_motor_db = 50.7;       // one motor at single_motor_speed
  double single_motor_speed = 5.0;     // rad/s
  double both_motors_db = 61.1;        // both motors at both_motors_speed
  double both_motors_speed = 30.0;     // rad/s
  std::vector<double> torque_gain{0.915, 0.938};
  std::vector<double> torque_offset{0.120, 0.120};
};

struct CalibrationConfig {
  CalibrationTargets targets;
  std::vector<std::string> free_params{"idle_power", "winding_resistance"};
  double surrogate_window = 60.0;  // s of simulated motion per load condition
};

/// Everything a run depends on besides the seed and backend.
struct ToolkitConfig {
  sim::PlantParams plant;
  hal::DriveSettings drive;
  hal::SensorNoise sensor_noise;
  orchestrator::StaticTorqueConfig static_torque;
  orchestrator::VelocitySweepConfig velocity_sweep;
  orchestrator::ThermalConfig thermal;
  orchestrator::NoiseConfig noise;
  orchestrator::BatteryConfig battery;
  CalibrationConfig calibration;

  /// Throws kConfig naming the first violated invariant.
  void Validate() const;
};

/// Canonical YAML rendering. Key order is fixed and floats use the
/// shortest text that parses back to the same double, so
/// DumpConfig(LoadConfig(DumpConfig(c))) == DumpConfig(c).
std::string DumpConfig(const ToolkitConfig& config);

/// Missing keys keep their defaults; unknown keys and malformed values
/// throw kConfig with the offending key path.
ToolkitConfig LoadConfig(std::string_view yaml);
ToolkitConfig LoadConfigFile(const std::filesystem::path& path);

/// Lower-case hex SHA-256.
std::string Sha256Hex(std::string_view bytes);

}  // namespace tdu::report
