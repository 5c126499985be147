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
#include <functional>
#include <numbers>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "tdu/analysis/analysis.h"
#include "tdu/hal/drive.h"
#include "tdu/orchestrator/table.h"

namespace tdu::orchestrator {

/// Shared by every protocol run. Abort requests are honoured between
/// schedule steps and surface as ErrorCode::kProtocol.
struct RunContext {
  std::stop_token stop;
  std::function<void(const std::string&)> progress;
};

// Static torque --------------------------------------------------------------

struct StaticTorqueConfig {
  std::vector<double> torque_levels{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  double settle = 30.0;  // s
  int repetitions = 5;
  double pulley_radius = 0.015;  // m
  std::vector<MotorId> motors{MotorId::kMotor1, MotorId::kMotor2};

  void Validate() const;
};

struct MotorFit {
  MotorId motor;
  analysis::LinearFit fit;  // measured vs commanded
};

/// Repeatability of one commanded level.
struct LevelSpread {
  MotorId motor;
  double commanded = 0.0;
  double mean = 0.0;  // N*m
  double sd = 0.0;    // N*m, population
};

struct StaticTorqueResult {
  std::vector<MotorFit> fits;
  std::vector<LevelSpread> spreads;
  /// One row per measurement: motor, repetition, t, commanded_nm, tension_n,
  /// measured_nm, drive_torque_nm, current_a.
  Table telemetry;
};

/// Scale readings for every motor x repetition x level, sequentially per
/// motor, with the other rotor left free.
StaticTorqueResult run_static_torque(const StaticTorqueConfig& cfg, hal::Drive& drive,
                                     hal::Bench& bench, const RunContext& ctx = {});

/// Fits and spreads from a static-torque telemetry table.
StaticTorqueResult analyze_static_torque(Table telemetry);

// Velocity sweep -------------------------------------------------------------

struct VelocitySweepConfig {
  std::vector<double> amplitudes{5, 10, 15, 20, 25, 30};  // rad/s
  std::vector<double> frequencies = analysis::log_space_grid(0.1, 10.0, 20);
  int cycles_per_point = 10;
  bool average_motors = true;
  double max_sample_period = 0.01;  // s
  int min_samples_per_cycle = 50;

  void Validate() const;
};

struct SweepPoint {
  double amplitude = 0.0;
  double frequency = 0.0;
  std::array<analysis::GainPhase, 2> per_motor{};
  /// True when |velocity| stayed above twice the amplitude for longer than
  /// a tenth of a cycle; gain and phase are NaN.
  bool diverged = false;
};

struct VelocitySweepResult {
  std::vector<SweepPoint> points;
  bool average_motors = true;
  /// Measured cycles only: amplitude_rad_s, freq_hz, t, reference_rad_s,
  /// velocity_m1_rad_s, velocity_m2_rad_s.
  Table telemetry;

  /// Motor-averaged points, or motor 1 alone when averaging is disabled.
  std::vector<analysis::BodePoint> bode() const;
};

/// Sinusoidal velocity references on both free rotors at every
/// (amplitude, frequency); one discarded transient cycle precedes the
/// measured cycles.
VelocitySweepResult run_velocity_sweep(const VelocitySweepConfig& cfg, hal::Drive& drive,
                                       hal::Bench& bench, const RunContext& ctx = {});

VelocitySweepResult analyze_velocity_sweep(Table telemetry, bool average_motors);

// Thermal --------------------------------------------------------------------

struct ThermalConfig {
  double hold_torque = 1.5;                              // N*m, motor 1
  double position_amplitude = 2.0 * std::numbers::pi;    // rad, motor 2
  double position_period = 4.0;                          // s
  double cutoff_temp = 80.0;                             // degC
  double rise_from = 30.0;                               // degC
  double fall_to = 30.0;                                 // degC
  double fall_secondary = 40.0;                          // degC
  double pre_settle = 300.0;                             // s
  double max_heat = 3600.0;                              // s
  double max_cool = 8000.0;                              // s
  double safety_margin = 5.0;                            // degC over cutoff
  double log_period = 1.0;                               // s
  std::vector<bool> phase_fans{true, false};
  double rated_torque = 1.5;                             // N*m

  void Validate() const;
};

struct ThermalPhase {
  bool fans_on = false;
  bool reached_cutoff = false;
  MotorId hottest = MotorId::kMotor1;   // first motor to reach the cutoff
  std::optional<double> rise;           // s, rise_from -> cutoff
  std::optional<double> fall;           // s, cutoff -> fall_to
  std::optional<double> fall_secondary; // s, cutoff -> fall_secondary
  double peak_temp = 0.0;               // degC, highest logged
  double final_temp = 0.0;              // degC, hottest motor at end of log
};

struct ThermalResult {
  std::vector<ThermalPhase> phases;
  /// phase, fans_on, stage, t, temp_m1_c, temp_m2_c, torque_m1_nm,
  /// torque_m2_nm. Stage is settle, heat or cool.
  Table telemetry;
};

/// Per phase: settle with the fans set, heat on the coupled rig until the
/// first motor logs cutoff_temp, then release the load and cool. Throws
/// kDriveFault if a logged temperature passes cutoff + safety_margin.
ThermalResult run_thermal(const ThermalConfig& cfg, hal::Drive& drive, hal::Bench& bench,
                          const RunContext& ctx = {});

ThermalResult analyze_thermal(Table telemetry, const ThermalConfig& cfg);

// Noise ----------------------------------------------------------------------

enum class NoiseCondition : std::uint8_t { kFloor, kFansOnly, kMotor1, kMotor2, kBoth };

std::string NoiseConditionName(NoiseCondition c);
NoiseCondition ParseNoiseCondition(const std::string& name);

struct NoiseConfig {
  double window = 20.0;  // s
  std::vector<double> speeds{5, 10, 15, 20, 25, 30};  // rad/s
  std::vector<NoiseCondition> conditions{NoiseCondition::kMotor1, NoiseCondition::kMotor2,
                                         NoiseCondition::kBoth};
  double spin_up = 3.0;      // s before each window
  double log_period = 0.1;   // s
  bool fans_with_motors = true;

  void Validate() const;
};

struct NoiseMeasurement {
  NoiseCondition condition = NoiseCondition::kFloor;
  double speed = 0.0;  // rad/s
  double raw_db = 0.0;
  double level_db = 0.0;  // floor-subtracted except for the floor itself
  bool floor_subtracted = false;
};

struct NoiseResult {
  std::vector<NoiseMeasurement> measurements;
  /// condition, speed_rad_s, t, velocity_m1_rad_s, velocity_m2_rad_s.
  Table telemetry;
};

/// Room floor with the TDU off, fans only, then every condition x speed.
NoiseResult run_noise(const NoiseConfig& cfg, hal::Drive& drive, hal::Bench& bench,
                      const RunContext& ctx = {});

// Battery --------------------------------------------------------------------

struct BatteryConfig {
  std::vector<double> loads{0.0, 2.0, 4.0, 6.0};       // kg, 0 is idle
  double position_amplitude = 2.0 * std::numbers::pi;  // rad
  double position_period = 6.0;                        // s
  double start_voltage = 29.1;                         // V
  double cutoff = 17.5;                                // V
  double max_duration = 24.0 * 3600.0;                 // s per condition
  double log_period = 1.0;                             // s
  double torque_window = 60.0;                         // s
  double torque_period = 0.01;                         // s

  void Validate() const;
};

struct BatteryCondition {
  double load = 0.0;  // kg
  double runtime = 0.0;  // s
  analysis::TorqueStats torque;  // both motors pooled
  double mean_power = 0.0;  // W, usable energy over runtime
};

struct BatteryResult {
  std::vector<BatteryCondition> conditions;
  /// load_kg, t, pack_voltage_v, torque_m1_nm, torque_m2_nm.
  Table telemetry;
  /// load_kg, t, torque_m1_nm, torque_m2_nm over the first torque_window.
  Table torque_log;
};

/// Each condition starts from a recharged pack and runs the lift profile
/// (or idles) until the pack hits cutoff.
BatteryResult run_battery(const BatteryConfig& cfg, hal::Drive& drive, hal::Bench& bench,
                          double usable_energy_wh, const RunContext& ctx = {});

/// Runtime and torque statistics recomputed from the stored logs.
std::vector<BatteryCondition> analyze_battery(const Table& telemetry,
                                              const Table& torque_log, double cutoff,
                                              double usable_energy_wh);

}  // namespace tdu::orchestrator
