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


#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "tdu/hal/sim_backend.h"
#include "tdu/orchestrator/protocols.h"

namespace tdu::orchestrator {
namespace {

using hal::SensorNoise;
using hal::SimBackend;

SimBackend Rig(std::uint64_t seed = 7, SensorNoise noise = {}, sim::PlantParams p = {}) {
  return SimBackend(std::move(p), hal::DriveSettings{}, noise, seed);
}

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

// Static torque ---------------------------------------------------------------

TEST(StaticTorque, DefaultScheduleMeasuresEightyPoints) {
  SimBackend sim = Rig();
  const StaticTorqueResult r = run_static_torque(StaticTorqueConfig{}, sim, sim);
  EXPECT_EQ(r.telemetry.rows.size(), 80u);
  ASSERT_EQ(r.fits.size(), 2u);
  EXPECT_NEAR(r.fits[0].fit.slope, 0.915, 0.01);
  EXPECT_NEAR(r.fits[0].fit.intercept, -0.120, 0.01);
  EXPECT_NEAR(r.fits[1].fit.slope, 0.938, 0.01);
  EXPECT_GE(r.fits[0].fit.r_squared, 0.999);
  EXPECT_EQ(r.spreads.size(), 16u);
  const double noise_torque = SensorNoise{}.tension * 0.015;
  for (const auto& s : r.spreads) EXPECT_LE(s.sd, 3.0 * noise_torque);
}

TEST(StaticTorque, NoiselessSingleLevelMatchesTorqueMap) {
  SimBackend sim = Rig(1, SensorNoise{0.0, 0.0, 0.0});
  StaticTorqueConfig cfg;
  cfg.torque_levels = {1.0, 1.5};
  cfg.repetitions = 1;
  cfg.motors = {MotorId::kMotor1};
  const StaticTorqueResult r = run_static_torque(cfg, sim, sim);
  ASSERT_EQ(r.telemetry.rows.size(), 2u);
  const auto measured = r.telemetry.Reals("measured_nm");
  const auto drive = r.telemetry.Reals("drive_torque_nm");
  EXPECT_DOUBLE_EQ(measured[0], drive[0]);
  EXPECT_NEAR(measured[0], 0.795, 1e-12);
  EXPECT_NEAR(measured[1], 1.2525, 1e-12);
  EXPECT_NEAR(r.fits[0].fit.slope, 0.915, 1e-12);
  EXPECT_NEAR(r.fits[0].fit.intercept, -0.12, 1e-12);
}

TEST(StaticTorque, MetricsReproduceFromTelemetry) {
  SimBackend sim = Rig();
  StaticTorqueConfig cfg;
  cfg.settle = 2.0;
  const StaticTorqueResult r = run_static_torque(cfg, sim, sim);
  const StaticTorqueResult again = analyze_static_torque(r.telemetry);
  ASSERT_EQ(again.fits.size(), r.fits.size());
  for (std::size_t i = 0; i < r.fits.size(); ++i) {
    EXPECT_EQ(again.fits[i].fit.slope, r.fits[i].fit.slope);
    EXPECT_EQ(again.fits[i].fit.intercept, r.fits[i].fit.intercept);
  }
}

TEST(StaticTorque, ConfigInvariants) {
  StaticTorqueConfig cfg;
  cfg.torque_levels = {0.5, 0.25};
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kConfig);
  cfg = {};
  cfg.repetitions = 0;
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kConfig);
}

// Velocity sweep --------------------------------------------------------------

TEST(VelocitySweep, DefaultGridGivesOneHundredTwentyPoints) {
  SimBackend sim = Rig();
  const VelocitySweepResult r = run_velocity_sweep(VelocitySweepConfig{}, sim, sim);
  EXPECT_EQ(r.points.size(), 120u);
  EXPECT_EQ(r.bode().size(), 120u);
  std::set<std::pair<double, double>> keys;
  for (const auto& p : r.bode()) {
    keys.emplace(p.amplitude, p.frequency);
    EXPECT_GT(p.frequency, 0.0);
    EXPECT_GT(p.phase_deg, -180.0);
    EXPECT_LE(p.phase_deg, 180.0);
  }
  EXPECT_EQ(keys.size(), 120u);

  const VelocitySweepResult again = analyze_velocity_sweep(r.telemetry, true);
  ASSERT_EQ(again.points.size(), r.points.size());
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    EXPECT_EQ(again.bode()[i].gain_db, r.bode()[i].gain_db);
    EXPECT_EQ(again.bode()[i].phase_deg, r.bode()[i].phase_deg);
  }
}

TEST(VelocitySweep, QuasiStaticTrackingAtPointOneHertz) {
  SimBackend sim = Rig();
  VelocitySweepConfig cfg;
  cfg.amplitudes = {30.0};
  cfg.frequencies = {0.1};
  const VelocitySweepResult r = run_velocity_sweep(cfg, sim, sim);
  ASSERT_EQ(r.bode().size(), 1u);
  EXPECT_NEAR(r.bode()[0].gain_db, 0.0, 0.2);
}

TEST(VelocitySweep, AveragingUsesBothMotors) {
  SimBackend sim = Rig();
  VelocitySweepConfig cfg;
  cfg.amplitudes = {10.0};
  cfg.frequencies = {2.0};
  const VelocitySweepResult r = run_velocity_sweep(cfg, sim, sim);
  const auto& p = r.points[0];
  EXPECT_NEAR(r.bode()[0].gain_db, 0.5 * (p.per_motor[0].gain_db + p.per_motor[1].gain_db),
              1e-12);
  const VelocitySweepResult single = analyze_velocity_sweep(r.telemetry, false);
  EXPECT_EQ(single.bode()[0].gain_db, p.per_motor[0].gain_db);
}

TEST(VelocitySweep, AmplitudeBeyondLimitIsConfigError) {
  VelocitySweepConfig cfg;
  cfg.cycles_per_point = 2;
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kConfig);
  cfg = {};
  cfg.amplitudes = {-5.0};
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kConfig);
}

// Thermal ---------------------------------------------------------------------

TEST(Thermal, DefaultRunStaysUnderSafetyCeiling) {
  SimBackend sim = Rig();
  const ThermalConfig cfg;
  const ThermalResult r = run_thermal(cfg, sim, sim);
  ASSERT_EQ(r.phases.size(), 2u);
  for (double t : r.telemetry.Reals("temp_m1_c")) EXPECT_LE(t, cfg.cutoff_temp + 5.0);
  for (double t : r.telemetry.Reals("temp_m2_c")) EXPECT_LE(t, cfg.cutoff_temp + 5.0);
  for (const auto& p : r.phases) {
    EXPECT_TRUE(p.reached_cutoff);
    ASSERT_TRUE(p.rise.has_value());
    EXPECT_LE(p.peak_temp, cfg.cutoff_temp + 5.0);
  }
  EXPECT_TRUE(r.phases[0].fans_on);
  EXPECT_NEAR(*r.phases[0].rise, 520.0, 0.2 * 520.0);
  EXPECT_NEAR(*r.phases[0].fall, 850.0, 0.2 * 850.0);
  EXPECT_NEAR(*r.phases[1].rise, 300.0, 0.2 * 300.0);
  EXPECT_LT(*r.phases[0].fall, *r.phases[1].fall_secondary + 2000.0);

  const ThermalResult again = analyze_thermal(r.telemetry, cfg);
  EXPECT_EQ(again.phases[1].rise, r.phases[1].rise);
  EXPECT_EQ(again.phases[0].fall, r.phases[0].fall);
}

TEST(Thermal, NoHoldTorqueMeansNoRise) {
  SimBackend sim = Rig();
  ThermalConfig cfg;
  cfg.hold_torque = 0.0;
  cfg.position_amplitude = 0.0;
  cfg.pre_settle = 10.0;
  cfg.max_heat = 600.0;
  cfg.phase_fans = {true};
  const ThermalResult r = run_thermal(cfg, sim, sim);
  ASSERT_EQ(r.phases.size(), 1u);
  EXPECT_FALSE(r.phases[0].reached_cutoff);
  EXPECT_FALSE(r.phases[0].rise.has_value());
  for (double t : r.telemetry.Reals("temp_m1_c")) EXPECT_NEAR(t, 23.0, 1.0);
}

TEST(Thermal, OvershootBeyondMarginFaults) {
  SimBackend sim = Rig(3, SensorNoise{0.0, 0.0, 0.0});
  ThermalConfig cfg;
  cfg.pre_settle = 1.0;
  cfg.log_period = 200.0;
  cfg.phase_fans = {false};
  cfg.safety_margin = 0.5;
  EXPECT_EQ(CodeOf([&] { run_thermal(cfg, sim, sim); }), ErrorCode::kDriveFault);
  sim.tick();
  EXPECT_EQ(sim.mode(MotorId::kMotor1), hal::DriveMode::kIdle);
  EXPECT_EQ(sim.mode(MotorId::kMotor2), hal::DriveMode::kIdle);
}

TEST(Thermal, HoldTorqueAboveRatedIsConfigError) {
  ThermalConfig cfg;
  cfg.hold_torque = 1.6;
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kConfig);
  cfg = {};
  cfg.cutoff_temp = 120.0;
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kConfig);
}

// Noise -----------------------------------------------------------------------

TEST(Noise, DefaultsGiveTwentyMeasurements) {
  SimBackend sim = Rig();
  const NoiseResult r = run_noise(NoiseConfig{}, sim, sim);
  ASSERT_EQ(r.measurements.size(), 20u);
  EXPECT_EQ(r.measurements[0].condition, NoiseCondition::kFloor);
  EXPECT_FALSE(r.measurements[0].floor_subtracted);
  EXPECT_EQ(r.measurements[1].condition, NoiseCondition::kFansOnly);
  EXPECT_NEAR(r.measurements[1].level_db, 43.7, 0.5);
  for (std::size_t i = 1; i < r.measurements.size(); ++i) {
    const auto& m = r.measurements[i];
    EXPECT_TRUE(m.floor_subtracted);
    EXPECT_NEAR(m.level_db, analysis::leq_subtract(m.raw_db, r.measurements[0].raw_db), 1e-12);
  }
  const auto& last = r.measurements.back();
  EXPECT_EQ(last.condition, NoiseCondition::kBoth);
  EXPECT_EQ(last.speed, 30.0);
  EXPECT_NEAR(last.level_db, 61.1, 1.0);
}

class DeafBench final : public hal::Bench {
 public:
  explicit DeafBench(SimBackend& sim) : sim_(sim) {}
  void set_fixture(const sim::Fixture& f) override { sim_.set_fixture(f); }
  double read_tension(MotorId m) override { return sim_.read_tension(m); }
  void start_sound_meter() override { sim_.start_sound_meter(); }
  double read_sound_leq() override { return std::numeric_limits<double>::quiet_NaN(); }
  void charge_pack() override { sim_.charge_pack(); }

 private:
  SimBackend& sim_;
};

TEST(Noise, MissingFloorIsProtocolError) {
  SimBackend sim = Rig();
  DeafBench bench(sim);
  NoiseConfig cfg;
  cfg.window = 1.0;
  EXPECT_EQ(CodeOf([&] { run_noise(cfg, sim, bench); }), ErrorCode::kProtocol);
}

TEST(Noise, ConditionNamesRoundTrip) {
  for (auto c : {NoiseCondition::kFloor, NoiseCondition::kFansOnly, NoiseCondition::kMotor1,
                 NoiseCondition::kMotor2, NoiseCondition::kBoth}) {
    EXPECT_EQ(ParseNoiseCondition(NoiseConditionName(c)), c);
  }
  EXPECT_EQ(CodeOf([] { ParseNoiseCondition("motor3"); }), ErrorCode::kConfig);
}

// Battery ---------------------------------------------------------------------

TEST(Battery, ShortPackRuntimesDecreaseWithLoad) {
  sim::PlantParams p;
  p.battery.usable_energy = 0.5;
  SimBackend sim = Rig(7, SensorNoise{}, p);
  BatteryConfig cfg;
  cfg.loads = {0.0, 2.0, 6.0};
  const BatteryResult r = run_battery(cfg, sim, sim, p.battery.usable_energy);
  ASSERT_EQ(r.conditions.size(), 3u);
  EXPECT_NEAR(r.conditions[0].runtime, 0.5 * 3600.0 / 8.0, 1.0);
  EXPECT_GT(r.conditions[0].runtime, r.conditions[1].runtime);
  EXPECT_GT(r.conditions[1].runtime, r.conditions[2].runtime);
  EXPECT_EQ(r.conditions[0].torque.mean, 0.0);
  EXPECT_NEAR(r.conditions[1].torque.mean, 0.29419949999999995, 0.02);

  const auto again = analyze_battery(r.telemetry, r.torque_log, cfg.cutoff, 0.5);
  ASSERT_EQ(again.size(), 3u);
  for (std::size_t i = 0; i < again.size(); ++i) {
    EXPECT_EQ(again[i].runtime, r.conditions[i].runtime);
    EXPECT_EQ(again[i].torque.mean, r.conditions[i].torque.mean);
    EXPECT_EQ(again[i].torque.sd, r.conditions[i].torque.sd);
  }
}

TEST(Battery, HorizonWithoutDepletionIsNotReached) {
  SimBackend sim = Rig();
  BatteryConfig cfg;
  cfg.loads = {0.0};
  cfg.max_duration = 30.0;
  EXPECT_EQ(CodeOf([&] { run_battery(cfg, sim, sim, 90.72); }), ErrorCode::kNotReached);
}

TEST(Battery, NegativeLoadIsConfigError) {
  BatteryConfig cfg;
  cfg.loads = {-1.0};
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kConfig);
}

// Cross-cutting -----------------------------------------------------------------

TEST(Protocols, AbortSurfacesAsProtocolError) {
  SimBackend sim = Rig();
  std::stop_source stop;
  stop.request_stop();
  RunContext ctx{stop.get_token(), {}};
  EXPECT_EQ(CodeOf([&] { run_static_torque(StaticTorqueConfig{}, sim, sim, ctx); }),
            ErrorCode::kProtocol);
  EXPECT_EQ(CodeOf([&] { run_noise(NoiseConfig{}, sim, sim, ctx); }), ErrorCode::kProtocol);
}

TEST(Protocols, SameSeedReproducesTelemetry) {
  auto run = [](std::uint64_t seed) {
    SimBackend sim = Rig(seed);
    NoiseConfig cfg;
    cfg.window = 2.0;
    cfg.speeds = {5.0, 20.0};
    return run_noise(cfg, sim, sim);
  };
  const NoiseResult a = run(5);
  const NoiseResult b = run(5);
  EXPECT_EQ(a.telemetry, b.telemetry);
  for (std::size_t i = 0; i < a.measurements.size(); ++i) {
    EXPECT_EQ(a.measurements[i].raw_db, b.measurements[i].raw_db);
  }
  EXPECT_NE(run(6).measurements[0].raw_db, a.measurements[0].raw_db);
}

TEST(Protocols, ProgressIsReported) {
  SimBackend sim = Rig();
  std::vector<std::string> messages;
  RunContext ctx{{}, [&](const std::string& m) { messages.push_back(m); }};
  StaticTorqueConfig cfg;
  cfg.settle = 0.5;
  run_static_torque(cfg, sim, sim, ctx);
  EXPECT_FALSE(messages.empty());
}

}  // namespace
}  // namespace tdu::orchestrator
