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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tdu/analysis/analysis.h"
#include "tdu/codec/frame_codec.h"
#include "tdu/report/calibrate.h"
#include "tdu/report/csv.h"
#include "tdu/report/runner.h"

namespace {

namespace fs = std::filesystem;
using namespace tdu;
using namespace tdu::report;
using orchestrator::NoiseCondition;

constexpr std::uint64_t kSeed = 1;

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}

  void Check(bool ok, const std::string& detail) {
    std::printf("    %s %s\n", ok ? "ok  " : "FAIL", detail.c_str());
    pass_ = pass_ && ok;
  }

  void Fail(const std::string& detail) { Check(false, detail); }

  bool Finish() const {
    std::printf("%s %s\n", pass_ ? "PASS" : "FAIL", name_.c_str());
    std::fflush(stdout);
    return pass_;
  }

 private:
  std::string name_;
  bool pass_ = true;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

template <typename F>
double Seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RunOptions Options() {
  RunOptions o;
  o.seed = kSeed;
  o.accelerate = true;
  return o;
}

bool StaticTorque() {
  Criterion c("static-torque: slope and intercept within 0.01, R^2 >= 0.999, wall < 10 s");
  ToolkitConfig config;
  config.plant.motors[0].torque_gain = 0.915;
  config.plant.motors[0].torque_offset = 0.120;
  config.plant.motors[1].torque_gain = 0.938;
  config.plant.motors[1].torque_offset = 0.120;
  config.sensor_noise.tension = 0.1;
  TestReport report;
  const double wall =
      Seconds([&] { report = RunProtocol(Protocol::kStaticTorque, config, Options()); });
  const auto& r = std::get<orchestrator::StaticTorqueResult>(report.result);
  c.Check(r.fits.size() == 2, "two motor fits");
  for (const auto& f : r.fits) {
    const auto& m = config.plant.motor(f.motor);
    const std::string tag = "motor " + std::to_string(static_cast<int>(f.motor));
    c.Check(std::abs(f.fit.slope - m.torque_gain) <= 0.01,
            tag + Fmt(": slope %.5f (expected %.3f)", f.fit.slope, m.torque_gain));
    c.Check(std::abs(f.fit.intercept + m.torque_offset) <= 0.01,
            tag + Fmt(": intercept %.5f (expected %.3f)", f.fit.intercept, -m.torque_offset));
    c.Check(f.fit.r_squared >= 0.999, tag + Fmt(": R^2 %.6f", f.fit.r_squared));
  }
  c.Check(wall < 10.0, Fmt("wall time %.2f s", wall));
  return c.Finish();
}

bool VelocitySweep() {
  Criterion c(
      "velocity-sweep: 0.67 Hz/5 rad/s gain >= -1 dB and phase in [-10, -5] deg; "
      "|phase| <= 15 deg over 0.3-2 Hz at >= 15 rad/s; 10 Hz attenuation larger at 5 than "
      "30 rad/s; wall < 60 s");
  const ToolkitConfig config;
  TestReport report;
  const double wall =
      Seconds([&] { report = RunProtocol(Protocol::kVelocitySweep, config, Options()); });
  const auto bode = std::get<orchestrator::VelocitySweepResult>(report.result).bode();
  c.Check(bode.size() == 120, Fmt("%.0f Bode points", static_cast<double>(bode.size())));
  c.Check(wall < 60.0, Fmt("wall time %.2f s", wall));

  double worst_phase = 0.0;
  for (const auto& p : bode) {
    if (p.amplitude >= 15.0 && p.frequency >= 0.3 - 1e-9 && p.frequency <= 2.0 + 1e-9) {
      if (!(std::abs(p.phase_deg) <= std::abs(worst_phase))) worst_phase = p.phase_deg;
    }
  }
  c.Check(std::abs(worst_phase) <= 15.0,
          Fmt("largest |phase| over 0.3-2 Hz at >= 15 rad/s: %.2f deg", worst_phase));

  double g5 = NAN, g30 = NAN;
  for (const auto& p : bode) {
    if (std::abs(p.frequency - 10.0) > 1e-9) continue;
    if (p.amplitude == 5.0) g5 = p.gain_db;
    if (p.amplitude == 30.0) g30 = p.gain_db;
  }
  c.Check(g5 < g30, Fmt("10 Hz gain %.2f dB at 5 rad/s, %.2f dB at 30 rad/s", g5, g30));

  ToolkitConfig point = config;
  point.velocity_sweep.amplitudes = {5.0};
  point.velocity_sweep.frequencies = {0.67};
  const auto one = std::get<orchestrator::VelocitySweepResult>(
                       RunProtocol(Protocol::kVelocitySweep, point, Options()).result)
                       .bode();
  if (one.size() != 1) {
    c.Fail("0.67 Hz point missing");
  } else {
    c.Check(one[0].gain_db >= -1.0, Fmt("0.67 Hz gain %.3f dB", one[0].gain_db));
    c.Check(one[0].phase_deg >= -10.0 && one[0].phase_deg <= -5.0,
            Fmt("0.67 Hz phase %.3f deg", one[0].phase_deg));
  }
  return c.Finish();
}

bool Within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * target;
}

bool Thermal() {
  Criterion c(
      "thermal: rise 300 s (fans off) and 520 s (fans on), fall 850 s (fans on) within 20%; "
      "fans-off fall to 40 C in [2000, 3000] s; logged temperature <= 85 C");
  ToolkitConfig config;
  const CalibrationResult cal =
      Calibrate(config, {"heat_capacity", "r_th_fans_on", "r_th_fans_off"});
  config.plant = cal.params;
  for (const auto& [name, value] : cal.fitted) {
    c.Check(true, "calibrated " + name + Fmt(" = %.6g", value));
  }
  const auto r = std::get<orchestrator::ThermalResult>(
      RunProtocol(Protocol::kThermal, config, Options()).result);
  const orchestrator::ThermalPhase* on = nullptr;
  const orchestrator::ThermalPhase* off = nullptr;
  for (const auto& p : r.phases) (p.fans_on ? on : off) = &p;
  if (on == nullptr || off == nullptr) {
    c.Fail("both fan phases present");
    return c.Finish();
  }
  auto opt = [](const std::optional<double>& v) { return v ? *v : NAN; };
  c.Check(off->rise && Within(*off->rise, 300.0, 0.2), Fmt("fans off rise %.1f s", opt(off->rise)));
  c.Check(on->rise && Within(*on->rise, 520.0, 0.2), Fmt("fans on rise %.1f s", opt(on->rise)));
  c.Check(on->fall && Within(*on->fall, 850.0, 0.2), Fmt("fans on fall %.1f s", opt(on->fall)));
  c.Check(off->fall_secondary && *off->fall_secondary >= 2000.0 &&
              *off->fall_secondary <= 3000.0,
          Fmt("fans off fall to 40 C %.1f s", opt(off->fall_secondary)));
  double peak = -INFINITY;
  for (const char* col : {"temp_m1_c", "temp_m2_c"}) {
    for (double v : r.telemetry.Reals(col)) peak = std::max(peak, v);
  }
  c.Check(peak <= 85.0, Fmt("peak logged temperature %.2f C", peak));
  return c.Finish();
}

bool Noise() {
  Criterion c(
      "noise: fans-only 43.7 +/- 0.5 dB; active levels in [49.7, 62.1] dB; monotone in "
      "speed; both >= single; level arithmetic exact to 1e-9 dB");
  const auto r = std::get<orchestrator::NoiseResult>(
      RunProtocol(Protocol::kNoise, ToolkitConfig{}, Options()).result);
  std::map<NoiseCondition, std::map<double, double>> levels;
  for (const auto& m : r.measurements) {
    if (m.condition == NoiseCondition::kFansOnly) {
      c.Check(std::abs(m.level_db - 43.7) <= 0.5, Fmt("fans only %.3f dB", m.level_db));
    } else if (m.condition != NoiseCondition::kFloor) {
      levels[m.condition][m.speed] = m.level_db;
    }
  }
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [cond, by_speed] : levels) {
    double prev = -INFINITY;
    bool monotone = true;
    for (const auto& [speed, db] : by_speed) {
      lo = std::min(lo, db);
      hi = std::max(hi, db);
      monotone = monotone && db >= prev;
      prev = db;
    }
    c.Check(monotone, orchestrator::NoiseConditionName(cond) + " non-decreasing in speed");
  }
  c.Check(levels.size() == 3, "three active conditions");
  c.Check(lo >= 49.7 && hi <= 62.1, Fmt("active levels span [%.3f, %.3f] dB", lo, hi));
  bool dominates = true;
  for (const auto& [speed, both] : levels[NoiseCondition::kBoth]) {
    dominates = dominates && both >= levels[NoiseCondition::kMotor1][speed] &&
                both >= levels[NoiseCondition::kMotor2][speed];
  }
  c.Check(dominates, "both motors >= either single motor at every speed");

  const double e1 = std::abs(analysis::leq_subtract(60.0, 43.7) - 59.896979139792101);
  const double e2 = std::abs(analysis::leq_subtract(46.7103, 43.7) - 43.700000086720372);
  const double e3 =
      std::abs(analysis::energetic_add(std::vector<double>{50.0, 50.0}) - 53.010299956639813);
  c.Check(std::max({e1, e2, e3}) <= 1e-9,
          Fmt("worst example error %.3g dB", std::max({e1, e2, e3})));
  return c.Finish();
}

bool Battery() {
  Criterion c(
      "battery: calibrated runtimes 11:20:23 / 08:06:11 / 04:39:34 / 02:38:20 within 10%, "
      "strictly decreasing; 2 kg mean torque in [0.28, 0.32] N*m");
  ToolkitConfig config;
  const CalibrationResult cal = Calibrate(config, {"idle_power", "winding_resistance"});
  config.plant = cal.params;
  for (const auto& [name, value] : cal.fitted) {
    c.Check(true, "calibrated " + name + Fmt(" = %.6g", value));
  }
  const auto r = std::get<orchestrator::BatteryResult>(
      RunProtocol(Protocol::kBattery, config, Options()).result);
  const std::map<double, double> targets{
      {0.0, 40823.0}, {2.0, 29171.0}, {4.0, 16774.0}, {6.0, 9500.0}};
  double prev = INFINITY;
  bool decreasing = true;
  for (const auto& cond : r.conditions) {
    const double target = targets.at(cond.load);
    c.Check(Within(cond.runtime, target, 0.10),
            Fmt("%.0f kg runtime %.0f s (target %.0f s)", cond.load, cond.runtime, target) +
                " " + FormatHms(cond.runtime));
    decreasing = decreasing && cond.runtime < prev;
    prev = cond.runtime;
    if (cond.load == 2.0) {
      c.Check(cond.torque.mean >= 0.28 && cond.torque.mean <= 0.32,
              Fmt("2 kg mean torque %.4f N*m", cond.torque.mean));
    }
  }
  c.Check(r.conditions.size() == 4, "four load conditions");
  c.Check(decreasing, "runtime strictly decreasing in load");
  return c.Finish();
}

codec::RegisterMessage RandomMessage(std::mt19937_64& rng) {
  using namespace tdu::codec;
  std::uniform_int_distribution<std::uint32_t> bits;
  auto finite_float = [&] {
    while (true) {
      const float f = std::bit_cast<float>(bits(rng));
      if (std::isfinite(f)) return f;
    }
  };
  RegisterMessage m;
  m.motor = rng() % 2 == 0 ? MotorId::kMotor1 : MotorId::kMotor2;
  switch (rng() % 6) {
    case 0: m.body = SetMode{static_cast<WireMode>(rng() % 4)}; break;
    case 1: m.body = SetTarget{finite_float()}; break;
    case 2:
      m.body = SetGains{static_cast<GainLoop>(rng() % 2), static_cast<GainTerm>(rng() % 4),
                        finite_float()};
      break;
    case 3: m.body = FanCtl{rng() % 2 == 1}; break;
    case 4: m.body = TelemetryReq{static_cast<Channel>(rng() % 6)}; break;
    default: {
      const auto channel = static_cast<Channel>(rng() % 6);
      TelemetryResp resp{channel, finite_float()};
      if (channel == Channel::kStatorTemp) {
        resp.reading = static_cast<std::int16_t>(bits(rng) & 0xFFFF);
      }
      m.body = resp;
    }
  }
  return m;
}

bool Properties() {
  Criterion c(
      "properties: 1e4 codec round-trips, leq/energetic round-trip to 1e-9, gain_phase "
      "self-test over the grid, byte-identical CSVs for equal seed and config");
  std::mt19937_64 rng(4242);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto m = RandomMessage(rng);
    const auto f = codec::encode(m);
    const auto back = codec::decode(f);
    const auto* got = std::get_if<codec::RegisterMessage>(&back);
    if (got == nullptr || !(*got == m)) ++failures;
  }
  c.Check(failures == 0, Fmt("codec round-trip failures: %.0f of 10000", failures));

  std::uniform_real_distribution<double> level(0.0, 120.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = level(rng);
    const double b = std::clamp(level(rng), a - 20.0, a + 30.0);
    const double back = analysis::leq_subtract(analysis::energetic_add(std::vector<double>{a, b}), a);
    worst = std::max(worst, std::abs(back - b));
  }
  c.Check(worst <= 1e-9, Fmt("leq/energetic worst round-trip error %.3g dB", worst));

  double worst_gain = 0.0, worst_phase = 0.0;
  for (double f : analysis::log_space_grid(0.1, 10.0, 20)) {
    const double h = std::min(0.01, 1.0 / (50.0 * f));
    const auto n = static_cast<std::size_t>(std::ceil(10.0 / (f * h)));
    std::vector<double> t(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<double>(i) * h;
      y[i] = 5.0 * std::sin(2.0 * std::numbers::pi * f * t[i]);
    }
    const auto gp = analysis::gain_phase_at(t, y, y, f);
    worst_gain = std::max(worst_gain, std::abs(gp.gain_db));
    worst_phase = std::max(worst_phase, std::abs(gp.phase_deg));
  }
  c.Check(worst_gain <= 1e-9 && worst_phase <= 1e-9,
          Fmt("self-test worst |gain| %.3g dB, |phase| %.3g deg", worst_gain, worst_phase));

  const fs::path dir = fs::temp_directory_path() / "tdu_acceptance_determinism";
  fs::remove_all(dir);
  const std::vector<Protocol> protocols{Protocol::kStaticTorque, Protocol::kNoise,
                                        Protocol::kThermal};
  RunAndWrite(protocols, ToolkitConfig{}, Options(), dir / "a");
  RunAndWrite(protocols, ToolkitConfig{}, Options(), dir / "b");
  int compared = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    const fs::path other = dir / "b" / fs::relative(entry.path(), dir / "a");
    if (!fs::exists(other) || ReadFile(entry.path()) != ReadFile(other)) ++differing;
  }
  fs::remove_all(dir);
  c.Check(compared > 0 && differing == 0,
          Fmt("%.0f CSV files compared, %.0f differ", compared, differing));
  return c.Finish();
}

bool SimulatedOnly() {
  Criterion c("desk-scale: every criterion above runs on the simulated backend without hardware");
  c.Check(Options().backend == hal::BackendKind::kSim, "backend sim");
  return c.Finish();
}

}  // namespace

int main() {
  bool ok = true;
  for (auto criterion : {StaticTorque, VelocitySweep, Thermal, Noise, Battery, Properties,
                         SimulatedOnly}) {
    try {
      ok = criterion() && ok;
    } catch (const std::exception& e) {
      std::printf("FAIL criterion raised: %s\n", e.what());
      ok = false;
    }
  }
  return ok ? 0 : 1;
}
