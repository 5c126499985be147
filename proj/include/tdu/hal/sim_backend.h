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
#include <chrono>
#include <cstdint>
#include <deque>
#include <mutex>
#include <random>

#include "tdu/hal/drive.h"
#include "tdu/sim/plant.h"

namespace tdu::hal {

/// Standard deviations of the rig's measurement noise.
struct SensorNoise {
  double tension = 0.1;      // N, crane scale
  double temperature = 0.2;  // degC, stator NTC
  double acoustic = 0.1;     // dB, sound level meter

  void Validate() const;
};

/// In-process backend: drive firmware emulation on top of sim::Plant, plus
/// the simulated bench instruments. All noise comes from one seeded
/// generator, so identical inputs give identical outputs.
///
/// One thread drives tick(); sample() may be called concurrently and reads
/// a snapshot taken after the last completed step.
class SimBackend final : public Drive, public Bench {
 public:
  SimBackend(sim::PlantParams params, DriveSettings settings, SensorNoise noise,
             std::uint64_t seed, bool paced = false);

  Ack send_command(const DriveCommand& cmd) override;
  void set_gains(MotorId motor, DriveMode loop, const PidGains& gains) override;
  TelemetrySample sample(MotorId motor) override;
  void set_fans(bool on) override;
  void tick() override;
  double now() const override;
  double control_period() const override { return params_.dt; }
  std::string_view backend_id() const override { return "sim"; }

  void set_fixture(const sim::Fixture& fixture) override;
  double read_tension(MotorId motor) override;
  void start_sound_meter() override;
  double read_sound_leq() override;
  void charge_pack() override;

  /// Plant snapshot after the last completed step.
  sim::PlantState state() const;
  const sim::PlantParams& params() const { return params_; }
  const DriveSettings& settings() const { return settings_; }
  DriveMode mode(MotorId motor) const;
  double last_power() const;

 private:
  struct Channel {
    DriveMode mode = DriveMode::kIdle;
    double target = 0.0;
    PidGains velocity_gains;
    PidGains position_gains;
    PidState velocity_pid;
    PidState position_pid;
  };

  void Validate(const DriveCommand& cmd) const;
  void Latch(const DriveCommand& cmd);
  double TorqueRequest(Channel& ch, const sim::MotorParams& p,
                       const sim::MotorState& m);
  double Gaussian(double sigma);
  void Pace();

  sim::PlantParams params_;
  DriveSettings settings_;
  SensorNoise noise_;
  bool paced_;

  std::mutex command_mutex_;
  std::deque<DriveCommand> pending_;

  mutable std::mutex state_mutex_;
  sim::Plant plant_;
  std::array<Channel, 2> channels_;
  bool fault_ = false;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};

  std::chrono::steady_clock::time_point wall_start_;
};

}  // namespace tdu::hal
