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

#include "tdu/orchestrator/protocols.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace tdu::orchestrator {
namespace {

using analysis::GainPhase;
using hal::DriveCommand;
using hal::DriveMode;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void ConfigCheck(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kConfig, message);
}

void Progress(const RunContext& ctx, const std::string& message) {
  if (ctx.progress) ctx.progress(message);
}

void CheckStop(const RunContext& ctx) {
  if (ctx.stop.stop_requested()) throw Error(ErrorCode::kProtocol, "run aborted");
}

std::int64_t Ticks(const hal::Drive& drive, double seconds) {
  return std::max<std::int64_t>(
      0, std::llround(seconds / drive.control_period()));
}

void Command(hal::Drive& drive, MotorId motor, DriveMode mode, double target) {
  drive.send_command(DriveCommand{motor, mode, target, drive.now()});
}

void IdleAll(hal::Drive& drive) {
  for (MotorId m : kMotors) Command(drive, m, DriveMode::kIdle, 0.0);
}

void Advance(hal::Drive& drive, std::int64_t ticks, const RunContext& ctx) {
  for (std::int64_t i = 0; i < ticks; ++i) {
    if ((i & 0x3FF) == 0) CheckStop(ctx);
    drive.tick();
  }
}

std::string Fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::int64_t MotorCell(MotorId m) { return static_cast<std::int64_t>(m); }

}  // namespace

// Static torque --------------------------------------------------------------

void StaticTorqueConfig::Validate() const {
  ConfigCheck(!torque_levels.empty(), "static_torque.torque_levels is empty");
  for (std::size_t i = 0; i < torque_levels.size(); ++i) {
    ConfigCheck(torque_levels[i] > 0.0, "static_torque.torque_levels must be positive");
    ConfigCheck(i == 0 || torque_levels[i] > torque_levels[i - 1],
                "static_torque.torque_levels must be ascending");
  }
  ConfigCheck(settle > 0.0, "static_torque.settle must be positive");
  ConfigCheck(repetitions >= 1, "static_torque.repetitions must be >= 1");
  ConfigCheck(pulley_radius > 0.0, "static_torque.pulley_radius must be positive");
  ConfigCheck(!motors.empty(), "static_torque.motors is empty");
}

namespace {

Table StaticTorqueTable() {
  return Table{{{"motor", CellType::kInteger},
                {"repetition", CellType::kInteger},
                {"t", CellType::kReal},
                {"commanded_nm", CellType::kReal},
                {"tension_n", CellType::kReal},
                {"measured_nm", CellType::kReal},
                {"drive_torque_nm", CellType::kReal},
                {"current_a", CellType::kReal}},
               {}};
}

}  // namespace

StaticTorqueResult run_static_torque(const StaticTorqueConfig& cfg, hal::Drive& drive,
                                     hal::Bench& bench, const RunContext& ctx) {
  cfg.Validate();
  Table table = StaticTorqueTable();
  const std::int64_t settle = Ticks(drive, cfg.settle);
  for (MotorId motor : cfg.motors) {
    Progress(ctx, "static torque: motor " + std::to_string(MotorCell(motor)));
    sim::Fixture fixture;
    fixture.attachments[Index(motor)] = sim::AnchoredCable{};
    IdleAll(drive);
    bench.set_fixture(fixture);
    for (int rep = 1; rep <= cfg.repetitions; ++rep) {
      for (double level : cfg.torque_levels) {
        Command(drive, motor, DriveMode::kTorque, level);
        Advance(drive, settle, ctx);
        const double tension = bench.read_tension(motor);
        const hal::TelemetrySample s = drive.sample(motor);
        table.Add({MotorCell(motor), std::int64_t{rep}, s.t, level, tension,
                   tension * cfg.pulley_radius, s.torque, s.current});
      }
    }
    IdleAll(drive);
  }
  bench.set_fixture(sim::Fixture{});
  return analyze_static_torque(std::move(table));
}

StaticTorqueResult analyze_static_torque(Table telemetry) {
  StaticTorqueResult out;
  const std::size_t c_motor = telemetry.Find("motor");
  const std::size_t c_cmd = telemetry.Find("commanded_nm");
  const std::size_t c_meas = telemetry.Find("measured_nm");
  std::map<std::int64_t, std::vector<std::pair<double, double>>> by_motor;
  std::map<std::pair<std::int64_t, double>, std::vector<double>> by_level;
  for (const auto& row : telemetry.rows) {
    const auto m = std::get<std::int64_t>(row[c_motor]);
    const double x = std::get<double>(row[c_cmd]);
    const double y = std::get<double>(row[c_meas]);
    by_motor[m].emplace_back(x, y);
    by_level[{m, x}].push_back(y);
  }
  for (const auto& [m, points] : by_motor) {
    out.fits.push_back({MotorIdFromInt(static_cast<int>(m)), analysis::linear_fit(points)});
  }
  for (const auto& [key, values] : by_level) {
    const auto stats = analysis::torque_stats(values);
    out.spreads.push_back(
        {MotorIdFromInt(static_cast<int>(key.first)), key.second, stats.mean, stats.sd});
  }
  out.telemetry = std::move(telemetry);
  return out;
}

// Velocity sweep -------------------------------------------------------------

void VelocitySweepConfig::Validate() const {
  ConfigCheck(!amplitudes.empty(), "velocity_sweep.amplitudes is empty");
  for (double a : amplitudes) {
    ConfigCheck(a > 0.0, "velocity_sweep.amplitudes must be positive");
  }
  ConfigCheck(!frequencies.empty(), "velocity_sweep.frequencies is empty");
  for (double f : frequencies) {
    ConfigCheck(f > 0.0, "velocity_sweep.frequencies must be positive");
  }
  ConfigCheck(cycles_per_point >= 3, "velocity_sweep.cycles_per_point must be >= 3");
  ConfigCheck(max_sample_period > 0.0, "velocity_sweep.max_sample_period must be positive");
  ConfigCheck(min_samples_per_cycle > 10,
              "velocity_sweep.min_samples_per_cycle must exceed 10");
}

namespace {

Table SweepTable() {
  return Table{{{"amplitude_rad_s", CellType::kReal},
                {"freq_hz", CellType::kReal},
                {"t", CellType::kReal},
                {"reference_rad_s", CellType::kReal},
                {"velocity_m1_rad_s", CellType::kReal},
                {"velocity_m2_rad_s", CellType::kReal}},
               {}};
}

}  // namespace

std::vector<analysis::BodePoint> VelocitySweepResult::bode() const {
  std::vector<analysis::BodePoint> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    analysis::BodePoint b{p.amplitude, p.frequency, p.per_motor[0].gain_db,
                          p.per_motor[0].phase_deg};
    if (average_motors) {
      b.gain_db = 0.5 * (p.per_motor[0].gain_db + p.per_motor[1].gain_db);
      b.phase_deg = 0.5 * (p.per_motor[0].phase_deg + p.per_motor[1].phase_deg);
    }
    out.push_back(b);
  }
  return out;
}

VelocitySweepResult run_velocity_sweep(const VelocitySweepConfig& cfg, hal::Drive& drive,
                                       hal::Bench& bench, const RunContext& ctx) {
  cfg.Validate();
  IdleAll(drive);
  bench.set_fixture(sim::Fixture{});
  Table table = SweepTable();
  const double dt = drive.control_period();

  for (double amplitude : cfg.amplitudes) {
    Progress(ctx, "velocity sweep: amplitude " + Fmt(amplitude) + " rad/s");
    for (double freq : cfg.frequencies) {
      CheckStop(ctx);
      const double period = 1.0 / freq;
      const double w = 2.0 * std::numbers::pi * freq;
      const double h_target =
          std::min(cfg.max_sample_period, period / cfg.min_samples_per_cycle);
      const std::int64_t every = std::max<std::int64_t>(1, std::llround(h_target / dt));
      const double h = static_cast<double>(every) * dt;
      const auto samples = static_cast<std::int64_t>(
          std::ceil(cfg.cycles_per_point * period / h - 1e-9));
      const std::int64_t transient = Ticks(drive, period);
      const std::int64_t divergence_limit =
          std::max<std::int64_t>(2, std::llround(0.1 * period / h));

      for (MotorId m : kMotors) Command(drive, m, DriveMode::kVelocityPid, 0.0);
      const double t0 = drive.now();
      auto step = [&] {
        const double r = amplitude * std::sin(w * (drive.now() - t0));
        for (MotorId m : kMotors) Command(drive, m, DriveMode::kVelocityPid, r);
        drive.tick();
      };
      for (std::int64_t i = 0; i < transient; ++i) step();

      std::int64_t above = 0;
      for (std::int64_t n = 0; n < samples; ++n) {
        for (std::int64_t k = 0; k < every; ++k) step();
        const hal::TelemetrySample s1 = drive.sample(MotorId::kMotor1);
        const hal::TelemetrySample s2 = drive.sample(MotorId::kMotor2);
        const double ref = amplitude * std::sin(w * (s1.t - t0));
        table.Add({amplitude, freq, s1.t, ref, s1.velocity, s2.velocity});
        const double limit = 2.0 * amplitude;
        above = (std::abs(s1.velocity) > limit || std::abs(s2.velocity) > limit)
                    ? above + 1
                    : 0;
        if (above > divergence_limit) {
          Progress(ctx, "velocity sweep: tracking diverged at " + Fmt(freq) + " Hz");
          break;
        }
      }
      for (MotorId m : kMotors) Command(drive, m, DriveMode::kVelocityPid, 0.0);
      Advance(drive, Ticks(drive, 0.5), ctx);
    }
  }
  IdleAll(drive);
  return analyze_velocity_sweep(std::move(table), cfg.average_motors);
}

VelocitySweepResult analyze_velocity_sweep(Table telemetry, bool average_motors) {
  VelocitySweepResult out;
  out.average_motors = average_motors;
  const std::size_t c_amp = telemetry.Find("amplitude_rad_s");
  const std::size_t c_freq = telemetry.Find("freq_hz");
  const std::size_t c_t = telemetry.Find("t");
  const std::size_t c_ref = telemetry.Find("reference_rad_s");
  const std::size_t c_v1 = telemetry.Find("velocity_m1_rad_s");
  const std::size_t c_v2 = telemetry.Find("velocity_m2_rad_s");

  std::size_t i = 0;
  const auto& rows = telemetry.rows;
  while (i < rows.size()) {
    const double amp = std::get<double>(rows[i][c_amp]);
    const double freq = std::get<double>(rows[i][c_freq]);
    std::vector<double> t, ref, v1, v2;
    for (; i < rows.size() && std::get<double>(rows[i][c_amp]) == amp &&
           std::get<double>(rows[i][c_freq]) == freq;
         ++i) {
      t.push_back(std::get<double>(rows[i][c_t]));
      ref.push_back(std::get<double>(rows[i][c_ref]));
      v1.push_back(std::get<double>(rows[i][c_v1]));
      v2.push_back(std::get<double>(rows[i][c_v2]));
    }
    SweepPoint p;
    p.amplitude = amp;
    p.frequency = freq;
    try {
      p.per_motor[0] = analysis::gain_phase_at(t, ref, v1, freq);
      p.per_motor[1] = analysis::gain_phase_at(t, ref, v2, freq);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientData) throw;
      p.diverged = true;
      p.per_motor[0] = p.per_motor[1] = GainPhase{kNaN, kNaN};
    }
    out.points.push_back(p);
  }
  out.telemetry = std::move(telemetry);
  return out;
}

// Thermal --------------------------------------------------------------------

void ThermalConfig::Validate() const {
  ConfigCheck(hold_torque >= 0.0, "thermal.hold_torque must be >= 0");
  ConfigCheck(hold_torque <= rated_torque,
              "thermal.hold_torque must not exceed the rated torque");
  ConfigCheck(position_amplitude >= 0.0, "thermal.position_amplitude must be >= 0");
  ConfigCheck(position_period > 0.0, "thermal.position_period must be positive");
  ConfigCheck(cutoff_temp < 120.0, "thermal.cutoff_temp must be below 120 degC");
  ConfigCheck(rise_from < cutoff_temp, "thermal.rise_from must be below cutoff_temp");
  ConfigCheck(fall_to < cutoff_temp && fall_secondary < cutoff_temp,
              "thermal fall thresholds must be below cutoff_temp");
  ConfigCheck(pre_settle >= 0.0 && max_heat > 0.0 && max_cool > 0.0,
              "thermal durations must be positive");
  ConfigCheck(safety_margin > 0.0, "thermal.safety_margin must be positive");
  ConfigCheck(log_period > 0.0, "thermal.log_period must be positive");
  ConfigCheck(!phase_fans.empty(), "thermal.phase_fans is empty");
}

namespace {

Table ThermalTable() {
  return Table{{{"phase", CellType::kInteger},
                {"fans_on", CellType::kBool},
                {"stage", CellType::kText},
                {"t", CellType::kReal},
                {"temp_m1_c", CellType::kReal},
                {"temp_m2_c", CellType::kReal},
                {"torque_m1_nm", CellType::kReal},
                {"torque_m2_nm", CellType::kReal}},
               {}};
}

}  // namespace

ThermalResult run_thermal(const ThermalConfig& cfg, hal::Drive& drive, hal::Bench& bench,
                          const RunContext& ctx) {
  cfg.Validate();
  Table table = ThermalTable();
  const std::int64_t log_every = std::max<std::int64_t>(1, Ticks(drive, cfg.log_period));
  const double ceiling = cfg.cutoff_temp + cfg.safety_margin;

  for (std::size_t phase = 0; phase < cfg.phase_fans.size(); ++phase) {
    const bool fans = cfg.phase_fans[phase];
    Progress(ctx, std::string("thermal: phase ") + std::to_string(phase + 1) +
                      (fans ? " (fans on)" : " (fans off)"));
    std::array<double, 2> temps{};
    auto log = [&](const char* stage) {
      const hal::TelemetrySample s1 = drive.sample(MotorId::kMotor1);
      const hal::TelemetrySample s2 = drive.sample(MotorId::kMotor2);
      temps = {s1.stator_temp, s2.stator_temp};
      table.Add({static_cast<std::int64_t>(phase), fans, std::string(stage), s1.t,
                 s1.stator_temp, s2.stator_temp, s1.torque, s2.torque});
      if (std::max(temps[0], temps[1]) > ceiling) {
        IdleAll(drive);
        throw Error(ErrorCode::kDriveFault,
                    "stator temperature " + Fmt(std::max(temps[0], temps[1])) +
                        " degC passed the safety ceiling " + Fmt(ceiling));
      }
    };

    // Settle with the rotors held at home and the cable detached.
    drive.set_fans(fans);
    bench.set_fixture(sim::Fixture{});
    for (MotorId m : kMotors) Command(drive, m, DriveMode::kPositionPid, 0.0);
    const std::int64_t settle = Ticks(drive, cfg.pre_settle);
    log("settle");
    for (std::int64_t i = 1; i <= settle; ++i) {
      if ((i & 0x3FF) == 0) CheckStop(ctx);
      drive.tick();
      if (i % log_every == 0) log("settle");
    }

    // Heat on the coupled rig.
    sim::Fixture coupled;
    coupled.coupled = true;
    bench.set_fixture(coupled);
    Command(drive, MotorId::kMotor1, DriveMode::kTorque, cfg.hold_torque);
    const double w = 2.0 * std::numbers::pi / cfg.position_period;
    const double t0 = drive.now();
    const std::int64_t max_heat = Ticks(drive, cfg.max_heat);
    log("heat");
    for (std::int64_t i = 1; i <= max_heat; ++i) {
      if ((i & 0x3FF) == 0) CheckStop(ctx);
      Command(drive, MotorId::kMotor2, DriveMode::kPositionPid,
              cfg.position_amplitude * std::sin(w * (drive.now() - t0)));
      drive.tick();
      if (i % log_every == 0) {
        log("heat");
        if (std::max(temps[0], temps[1]) >= cfg.cutoff_temp) break;
      }
    }

    // Release and cool.
    IdleAll(drive);
    bench.set_fixture(sim::Fixture{});
    if (std::max(temps[0], temps[1]) >= cfg.cutoff_temp) {
      const std::int64_t max_cool = Ticks(drive, cfg.max_cool);
      for (std::int64_t i = 1; i <= max_cool; ++i) {
        if ((i & 0x3FF) == 0) CheckStop(ctx);
        drive.tick();
        if (i % log_every == 0) {
          log("cool");
          if (std::max(temps[0], temps[1]) <= cfg.fall_to) break;
        }
      }
    } else {
      Progress(ctx, "thermal: no rise to cutoff within max_heat");
    }
  }
  drive.set_fans(false);
  return analyze_thermal(std::move(table), cfg);
}

ThermalResult analyze_thermal(Table telemetry, const ThermalConfig& cfg) {
  ThermalResult out;
  const std::size_t c_phase = telemetry.Find("phase");
  const std::size_t c_fans = telemetry.Find("fans_on");
  const std::size_t c_stage = telemetry.Find("stage");
  const std::size_t c_t = telemetry.Find("t");
  const std::array<std::size_t, 2> c_temp{telemetry.Find("temp_m1_c"),
                                          telemetry.Find("temp_m2_c")};

  struct Series {
    std::vector<double> t;
    std::array<std::vector<double>, 2> temp;
  };
  std::map<std::int64_t, std::pair<bool, std::map<std::string, Series>>> phases;
  for (const auto& row : telemetry.rows) {
    auto& [fans, stages] = phases[std::get<std::int64_t>(row[c_phase])];
    fans = std::get<bool>(row[c_fans]);
    Series& s = stages[std::get<std::string>(row[c_stage])];
    s.t.push_back(std::get<double>(row[c_t]));
    for (std::size_t m = 0; m < 2; ++m) {
      s.temp[m].push_back(std::get<double>(row[c_temp[m]]));
    }
  }

  auto try_time = [](const std::vector<double>& t, const std::vector<double>& y,
                     double start, double stop) -> std::optional<double> {
    if (t.empty()) return std::nullopt;
    // A log that begins past the start threshold has no measurable crossing.
    if (stop > start ? y.front() >= start : y.front() < start) return std::nullopt;
    try {
      return analysis::time_to_threshold(t, y, start, stop);
    } catch (const NotReachedError&) {
      return std::nullopt;
    }
  };

  for (auto& [index, entry] : phases) {
    auto& [fans, stages] = entry;
    ThermalPhase p;
    p.fans_on = fans;
    const Series& heat = stages["heat"];
    Series cool = stages["cool"];
    if (!heat.t.empty()) {
      cool.t.insert(cool.t.begin(), heat.t.back());
      for (std::size_t m = 0; m < 2; ++m) {
        cool.temp[m].insert(cool.temp[m].begin(), heat.temp[m].back());
      }
    }
    for (const auto& [name, s] : stages) {
      for (const auto& temps : s.temp) {
        for (double v : temps) p.peak_temp = std::max(p.peak_temp, v);
      }
    }
    std::size_t hot = 0;
    if (!heat.t.empty()) {
      const double last1 = heat.temp[0].back();
      const double last2 = heat.temp[1].back();
      hot = last2 > last1 ? 1 : 0;
      p.reached_cutoff = std::max(last1, last2) >= cfg.cutoff_temp;
    }
    p.hottest = hot == 0 ? MotorId::kMotor1 : MotorId::kMotor2;
    if (p.reached_cutoff) {
      p.rise = try_time(heat.t, heat.temp[hot], cfg.rise_from, cfg.cutoff_temp);
      p.fall = try_time(cool.t, cool.temp[hot], cfg.cutoff_temp, cfg.fall_to);
      p.fall_secondary =
          try_time(cool.t, cool.temp[hot], cfg.cutoff_temp, cfg.fall_secondary);
    }
    const Series& last = cool.t.size() > 1 ? cool : heat;
    p.final_temp = last.t.empty() ? kNaN : last.temp[hot].back();
    out.phases.push_back(p);
  }
  out.telemetry = std::move(telemetry);
  return out;
}

// Noise ----------------------------------------------------------------------

std::string NoiseConditionName(NoiseCondition c) {
  switch (c) {
    case NoiseCondition::kFloor: return "floor";
    case NoiseCondition::kFansOnly: return "fans_only";
    case NoiseCondition::kMotor1: return "motor1";
    case NoiseCondition::kMotor2: return "motor2";
    case NoiseCondition::kBoth: return "both";
  }
  return "unknown";
}

NoiseCondition ParseNoiseCondition(const std::string& name) {
  for (auto c : {NoiseCondition::kFloor, NoiseCondition::kFansOnly, NoiseCondition::kMotor1,
                 NoiseCondition::kMotor2, NoiseCondition::kBoth}) {
    if (NoiseConditionName(c) == name) return c;
  }
  throw Error(ErrorCode::kConfig, "unknown noise condition '" + name + "'");
}

void NoiseConfig::Validate() const {
  ConfigCheck(window > 0.0, "noise.window must be positive");
  for (double s : speeds) ConfigCheck(s > 0.0, "noise.speeds must be positive");
  for (auto c : conditions) {
    ConfigCheck(c != NoiseCondition::kFloor && c != NoiseCondition::kFansOnly,
                "noise.conditions lists motor conditions only");
  }
  ConfigCheck(spin_up >= 0.0, "noise.spin_up must be >= 0");
  ConfigCheck(log_period > 0.0, "noise.log_period must be positive");
}

NoiseResult run_noise(const NoiseConfig& cfg, hal::Drive& drive, hal::Bench& bench,
                      const RunContext& ctx) {
  cfg.Validate();
  NoiseResult out;
  out.telemetry = Table{{{"condition", CellType::kText},
                         {"speed_rad_s", CellType::kReal},
                         {"t", CellType::kReal},
                         {"velocity_m1_rad_s", CellType::kReal},
                         {"velocity_m2_rad_s", CellType::kReal}},
                        {}};
  const std::int64_t log_every = std::max<std::int64_t>(1, Ticks(drive, cfg.log_period));
  const std::int64_t window = Ticks(drive, cfg.window);

  auto measure = [&](NoiseCondition c, double speed) {
    bench.start_sound_meter();
    for (std::int64_t i = 1; i <= window; ++i) {
      if ((i & 0x3FF) == 0) CheckStop(ctx);
      drive.tick();
      if (i % log_every == 0) {
        const auto s1 = drive.sample(MotorId::kMotor1);
        const auto s2 = drive.sample(MotorId::kMotor2);
        out.telemetry.Add({NoiseConditionName(c), speed, s1.t, s1.velocity, s2.velocity});
      }
    }
    return bench.read_sound_leq();
  };

  IdleAll(drive);
  bench.set_fixture(sim::Fixture{});

  Progress(ctx, "noise: room floor");
  drive.set_fans(false);
  const double floor = measure(NoiseCondition::kFloor, 0.0);
  if (!std::isfinite(floor)) {
    throw Error(ErrorCode::kProtocol, "room floor measurement missing");
  }
  out.measurements.push_back({NoiseCondition::kFloor, 0.0, floor, floor, false});

  auto record = [&](NoiseCondition c, double speed, double raw) {
    out.measurements.push_back(
        {c, speed, raw, analysis::leq_subtract(raw, floor), true});
  };

  Progress(ctx, "noise: fans only");
  drive.set_fans(true);
  Advance(drive, Ticks(drive, cfg.spin_up), ctx);
  record(NoiseCondition::kFansOnly, 0.0, measure(NoiseCondition::kFansOnly, 0.0));

  drive.set_fans(cfg.fans_with_motors);
  for (NoiseCondition c : cfg.conditions) {
    Progress(ctx, "noise: " + NoiseConditionName(c));
    const bool m1 = c == NoiseCondition::kMotor1 || c == NoiseCondition::kBoth;
    const bool m2 = c == NoiseCondition::kMotor2 || c == NoiseCondition::kBoth;
    for (double speed : cfg.speeds) {
      if (m1) Command(drive, MotorId::kMotor1, DriveMode::kVelocityPid, speed);
      if (m2) Command(drive, MotorId::kMotor2, DriveMode::kVelocityPid, speed);
      Advance(drive, Ticks(drive, cfg.spin_up), ctx);
      record(c, speed, measure(c, speed));
    }
    IdleAll(drive);
    Advance(drive, Ticks(drive, cfg.spin_up), ctx);
  }
  drive.set_fans(false);
  return out;
}

// Battery --------------------------------------------------------------------

void BatteryConfig::Validate() const {
  ConfigCheck(!loads.empty(), "battery.loads is empty");
  for (double l : loads) ConfigCheck(l >= 0.0, "battery.loads must be >= 0");
  ConfigCheck(position_period > 0.0, "battery.position_period must be positive");
  ConfigCheck(start_voltage > cutoff, "battery.start_voltage must exceed cutoff");
  ConfigCheck(max_duration > 0.0, "battery.max_duration must be positive");
  ConfigCheck(log_period > 0.0 && torque_period > 0.0,
              "battery logging periods must be positive");
  ConfigCheck(torque_window > 0.0, "battery.torque_window must be positive");
}

namespace {

Table BatteryTable() {
  return Table{{{"load_kg", CellType::kReal},
                {"t", CellType::kReal},
                {"pack_voltage_v", CellType::kReal},
                {"torque_m1_nm", CellType::kReal},
                {"torque_m2_nm", CellType::kReal}},
               {}};
}

Table TorqueLogTable() {
  return Table{{{"load_kg", CellType::kReal},
                {"t", CellType::kReal},
                {"torque_m1_nm", CellType::kReal},
                {"torque_m2_nm", CellType::kReal}},
               {}};
}

}  // namespace

BatteryResult run_battery(const BatteryConfig& cfg, hal::Drive& drive, hal::Bench& bench,
                          double usable_energy_wh, const RunContext& ctx) {
  cfg.Validate();
  BatteryResult out;
  out.telemetry = BatteryTable();
  out.torque_log = TorqueLogTable();
  const std::int64_t log_every = std::max<std::int64_t>(1, Ticks(drive, cfg.log_period));
  const std::int64_t torque_every =
      std::max<std::int64_t>(1, Ticks(drive, cfg.torque_period));
  const std::int64_t torque_ticks = Ticks(drive, cfg.torque_window);
  const std::int64_t max_ticks = Ticks(drive, cfg.max_duration);
  const double w = 2.0 * std::numbers::pi / cfg.position_period;

  for (double load : cfg.loads) {
    Progress(ctx, "battery: load " + Fmt(load) + " kg");
    const bool idle = load == 0.0;
    IdleAll(drive);
    bench.charge_pack();
    sim::Fixture fixture;
    if (!idle) fixture.attachments = {sim::HangingMass{load}, sim::HangingMass{load}};
    bench.set_fixture(fixture);
    drive.set_fans(true);

    double last_voltage = 0.0;
    auto log = [&] {
      const auto s1 = drive.sample(MotorId::kMotor1);
      const auto s2 = drive.sample(MotorId::kMotor2);
      last_voltage = s1.pack_voltage;
      out.telemetry.Add({load, s1.t, s1.pack_voltage, s1.torque, s2.torque});
    };
    log();
    if (last_voltage < cfg.start_voltage - 0.05) {
      throw Error(ErrorCode::kProtocol, "pack at " + Fmt(last_voltage) +
                                            " V, expected " + Fmt(cfg.start_voltage));
    }

    const double t0 = drive.now();
    bool depleted = false;
    for (std::int64_t i = 1; i <= max_ticks && !depleted; ++i) {
      if ((i & 0x3FF) == 0) CheckStop(ctx);
      try {
        if (!idle) {
          const double target = cfg.position_amplitude * std::sin(w * (drive.now() - t0));
          for (MotorId m : kMotors) Command(drive, m, DriveMode::kPositionPid, target);
        }
        drive.tick();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDriveFault) throw;
        log();
        if (last_voltage > cfg.cutoff) throw;
        break;
      }
      if (i <= torque_ticks && i % torque_every == 0) {
        const auto s1 = drive.sample(MotorId::kMotor1);
        const auto s2 = drive.sample(MotorId::kMotor2);
        out.torque_log.Add({load, s1.t, s1.torque, s2.torque});
      }
      if (i % log_every == 0) {
        log();
        depleted = last_voltage <= cfg.cutoff;
      }
    }
    if (last_voltage > cfg.cutoff) {
      IdleAll(drive);
      throw NotReachedError("pack did not reach cutoff within " + Fmt(cfg.max_duration) +
                                " s at load " + Fmt(load) + " kg",
                            last_voltage);
    }
  }
  drive.set_fans(false);
  bench.set_fixture(sim::Fixture{});
  bench.charge_pack();
  out.conditions =
      analyze_battery(out.telemetry, out.torque_log, cfg.cutoff, usable_energy_wh);
  return out;
}

std::vector<BatteryCondition> analyze_battery(const Table& telemetry,
                                              const Table& torque_log, double cutoff,
                                              double usable_energy_wh) {
  auto group = [](const Table& table, const std::vector<std::string>& names) {
    const std::size_t c_load = table.Find("load_kg");
    std::vector<std::size_t> cols;
    for (const auto& n : names) cols.push_back(table.Find(n));
    std::vector<std::pair<double, std::vector<std::vector<double>>>> out;
    for (const auto& row : table.rows) {
      const double load = std::get<double>(row[c_load]);
      if (out.empty() || out.back().first != load) {
        out.push_back({load, std::vector<std::vector<double>>(cols.size())});
      }
      for (std::size_t k = 0; k < cols.size(); ++k) {
        out.back().second[k].push_back(std::get<double>(row[cols[k]]));
      }
    }
    return out;
  };

  const auto voltage = group(telemetry, {"t", "pack_voltage_v"});
  const auto torque = group(torque_log, {"torque_m1_nm", "torque_m2_nm"});
  std::vector<BatteryCondition> out;
  for (const auto& [load, series] : voltage) {
    BatteryCondition c;
    c.load = load;
    c.runtime = analysis::runtime_from_log(series[0], series[1], cutoff);
    c.mean_power = usable_energy_wh * 3600.0 / c.runtime;
    for (const auto& [tl, ts] : torque) {
      if (tl != load) continue;
      std::vector<double> pooled = ts[0];
      pooled.insert(pooled.end(), ts[1].begin(), ts[1].end());
      c.torque = analysis::torque_stats(pooled);
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace tdu::orchestrator
