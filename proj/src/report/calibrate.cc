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

#include "tdu/report/calibrate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "tdu/analysis/analysis.h"
#include "tdu/hal/sim_backend.h"

namespace tdu::report {
namespace {

using hal::DriveCommand;
using hal::DriveMode;

struct Prediction {
  std::string target;
  double target_value;
  double model_value;
};

double RelativeError(double model, double target) {
  return target != 0.0 ? (model - target) / std::abs(target) : model - target;
}

std::string LoadName(double kg) {
  if (kg == 0.0) return "idle";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%gkg", kg);
  return buf;
}

double& Param(sim::PlantParams& p, const std::string& name) {
  if (name == "idle_power") return p.battery.idle_power;
  if (name == "winding_resistance") return p.motors[0].winding_resistance;
  if (name == "heat_capacity") return p.thermal.heat_capacity;
  if (name == "r_th_fans_on") return p.thermal.r_th_fans_on;
  if (name == "r_th_fans_off") return p.thermal.r_th_fans_off;
  if (name == "fans_level") return p.acoustic.fans_level;
  if (name == "motor_ref_level") return p.acoustic.motor_ref_level;
  if (name == "motor_slope") return p.acoustic.motor_slope;
  if (name == "torque_gain_m1") return p.motors[0].torque_gain;
  if (name == "torque_offset_m1") return p.motors[0].torque_offset;
  if (name == "torque_gain_m2") return p.motors[1].torque_gain;
  if (name == "torque_offset_m2") return p.motors[1].torque_offset;
  throw Error(ErrorCode::kCalibration, "unknown free parameter '" + name + "'");
}

void SetParam(sim::PlantParams& p, const std::string& name, double value) {
  Param(p, name) = value;
  if (name == "winding_resistance") p.motors[1].winding_resistance = value;
}

// Forward models -------------------------------------------------------------

std::vector<Prediction> TorqueModel(const ToolkitConfig& c, const sim::PlantParams& p) {
  const auto& t = c.calibration.targets;
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string m = "_m" + std::to_string(i + 1);
    out.push_back({"torque_gain" + m, t.torque_gain[i], p.motors[i].torque_gain});
    out.push_back({"torque_offset" + m, t.torque_offset[i], p.motors[i].torque_offset});
  }
  return out;
}

std::vector<Prediction> BatteryModel(const ToolkitConfig& c, const sim::PlantParams& p,
                                     const std::vector<BatteryDraw>& draws) {
  std::vector<Prediction> out;
  for (const auto& [load, runtime] : c.calibration.targets.runtimes) {
    double power = p.battery.idle_power;
    for (const auto& d : draws) {
      if (d.load != load) continue;
      power += d.mechanical;
      for (std::size_t i = 0; i < 2; ++i) {
        power += d.current_sq[i] * p.motors[i].winding_resistance;
      }
    }
    out.push_back({"runtime_" + LoadName(load), runtime,
                   p.battery.usable_energy * 3600.0 / power});
  }
  return out;
}

// Time for a first-order response to cover [from, to] on the way to
// `final` from below or above, all relative to ambient. A response that
// never gets there is given a large time growing with the shortfall, so the
// fit is pushed back towards reachable parameters.
double FirstOrderTime(double tau, double from, double to, double final_value) {
  constexpr double kUnreachable = 1.0e6;  // s
  const double num = final_value - from;
  const double den = final_value - to;
  if (num / den <= 1.0 || den * num <= 0.0) {
    const double shortfall = (to - final_value) * (to > from ? 1.0 : -1.0);
    return kUnreachable * (1.0 + std::max(shortfall, 0.0));
  }
  return tau * std::log(num / den);
}

std::vector<Prediction> ThermalModel(const ToolkitConfig& c, const sim::PlantParams& p,
                                     const std::array<double, 2>& current_sq) {
  const auto& t = c.calibration.targets;
  const auto& th = p.thermal;
  const auto& cfg = c.thermal;
  const double loss = std::max(current_sq[0] * p.motors[0].winding_resistance,
                               current_sq[1] * p.motors[1].winding_resistance);
  const double from = cfg.rise_from - th.ambient;
  const double cut = cfg.cutoff_temp - th.ambient;
  auto rise = [&](bool fans) {
    const double r = fans ? th.r_th_fans_on : th.r_th_fans_off;
    return FirstOrderTime(th.heat_capacity * r, from, cut, loss * r);
  };
  const double fall_on =
      FirstOrderTime(th.TimeConstant(true), cut, cfg.fall_to - th.ambient, 0.0);
  const double fall_off =
      FirstOrderTime(th.TimeConstant(false), cut, cfg.fall_secondary - th.ambient, 0.0);
  return {{"rise_fans_off", t.rise_fans_off, rise(false)},
          {"rise_fans_on", t.rise_fans_on, rise(true)},
          {"fall_fans_on", t.fall_fans_on, fall_on},
          {"fall_fans_off_to_40", t.fall_fans_off_to_40, fall_off}};
}

std::vector<Prediction> AcousticModel(const ToolkitConfig& c, const sim::PlantParams& p) {
  const auto& t = c.calibration.targets;
  const auto& a = p.acoustic;
  const bool fans = c.noise.fans_with_motors;
  auto level = [&](int motors, double speed) {
    std::vector<double> sources{a.room_floor};
    if (fans) sources.push_back(a.fans_level);
    for (int i = 0; i < motors; ++i) sources.push_back(sim::motor_source_level(speed, a));
    return analysis::leq_subtract(analysis::energetic_add(sources), a.room_floor);
  };
  const double fans_only = analysis::leq_subtract(
      analysis::energetic_add(std::vector<double>{a.room_floor, a.fans_level}),
      a.room_floor);
  return {{"fans_only_db", t.fans_only_db, fans_only},
          {"single_motor_db", t.single_motor_db, level(1, t.single_motor_speed)},
          {"both_motors_db", t.both_motors_db, level(2, t.both_motors_speed)}};
}

// Levenberg-Marquardt over log-parameters -----------------------------------

struct Residuals {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  std::function<std::vector<Prediction>(const sim::PlantParams&)> model;
  std::vector<std::string> names;
  sim::PlantParams base;
  int n_values = 0;

  int inputs() const { return static_cast<int>(names.size()); }
  int values() const { return n_values; }

  sim::PlantParams Apply(const Eigen::VectorXd& x) const {
    sim::PlantParams p = base;
    for (std::size_t i = 0; i < names.size(); ++i) {
      SetParam(p, names[i], std::exp(x[static_cast<Eigen::Index>(i)]));
    }
    return p;
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const auto preds = model(Apply(x));
    for (std::size_t i = 0; i < preds.size(); ++i) {
      f[static_cast<Eigen::Index>(i)] =
          RelativeError(preds[i].model_value, preds[i].target_value);
    }
    return 0;
  }
};

struct Group {
  const char* name;
  std::vector<std::string> params;
};

const std::vector<Group>& Groups() {
  static const std::vector<Group> groups{
      {"torque", {"torque_gain_m1", "torque_offset_m1", "torque_gain_m2", "torque_offset_m2"}},
      {"battery", {"idle_power", "winding_resistance"}},
      {"thermal", {"heat_capacity", "r_th_fans_on", "r_th_fans_off"}},
      {"acoustic", {"fans_level", "motor_ref_level", "motor_slope"}},
  };
  return groups;
}

sim::PlantParams Fit(const std::vector<std::string>& names, const sim::PlantParams& start,
                     std::function<std::vector<Prediction>(const sim::PlantParams&)> model) {
  Residuals r;
  r.model = std::move(model);
  r.names = names;
  r.base = start;
  r.n_values = static_cast<int>(r.model(start).size());
  Eigen::VectorXd x(static_cast<Eigen::Index>(names.size()));
  sim::PlantParams probe = start;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double v = Param(probe, names[i]);
    if (!(v > 0.0)) {
      throw Error(ErrorCode::kCalibration,
                  "free parameter '" + names[i] + "' must start positive");
    }
    x[static_cast<Eigen::Index>(i)] = std::log(v);
  }
  Eigen::NumericalDiff<Residuals> diff(r);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residuals>> lm(diff);
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-12;
  lm.parameters.maxfev = 2000;
  lm.minimize(x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw Error(ErrorCode::kCalibration, "fit diverged for '" +
                                               names[static_cast<std::size_t>(i)] + "'");
    }
  }
  return r.Apply(x);
}

hal::SimBackend QuietBackend(const ToolkitConfig& config) {
  return hal::SimBackend(config.plant, config.drive, hal::SensorNoise{0.0, 0.0, 0.0}, 0);
}

}  // namespace

std::vector<std::string> KnownFreeParams() {
  std::vector<std::string> out;
  for (const auto& g : Groups()) out.insert(out.end(), g.params.begin(), g.params.end());
  return out;
}

std::vector<BatteryDraw> SimulateBatteryDraw(const ToolkitConfig& config) {
  const auto& cfg = config.battery;
  const double w = 2.0 * std::numbers::pi / cfg.position_period;
  std::vector<BatteryDraw> out;
  for (const auto& [load, runtime] : config.calibration.targets.runtimes) {
    BatteryDraw draw;
    draw.load = load;
    if (load > 0.0) {
      hal::SimBackend sim = QuietBackend(config);
      sim.set_fixture({{sim::HangingMass{load}, sim::HangingMass{load}}, false});
      const double dt = sim.control_period();
      const auto skip = static_cast<std::int64_t>(std::llround(cfg.position_period / dt));
      const auto total = skip + static_cast<std::int64_t>(
                                    std::llround(config.calibration.surrogate_window / dt));
      double mech = 0.0;
      std::array<double, 2> isq{};
      for (std::int64_t i = 0; i < total; ++i) {
        const double target = cfg.position_amplitude * std::sin(w * sim.now());
        for (MotorId m : kMotors) {
          sim.send_command(DriveCommand{m, DriveMode::kPositionPid, target, sim.now()});
        }
        sim.tick();
        if (i < skip) continue;
        const sim::PlantState s = sim.state();
        for (std::size_t k = 0; k < 2; ++k) {
          const auto& m = s.motors[k];
          mech += std::max(0.0, m.applied_torque * m.velocity);
          const double amps = m.applied_torque / config.plant.motors[k].kt;
          isq[k] += amps * amps;
        }
      }
      const auto n = static_cast<double>(total - skip);
      draw.mechanical = mech / n;
      draw.current_sq = {isq[0] / n, isq[1] / n};
    }
    out.push_back(draw);
  }
  return out;
}

std::array<double, 2> SimulateThermalCurrent(const ToolkitConfig& config) {
  const auto& cfg = config.thermal;
  hal::SimBackend sim = QuietBackend(config);
  sim::Fixture coupled;
  coupled.coupled = true;
  sim.set_fixture(coupled);
  sim.send_command(DriveCommand{MotorId::kMotor1, DriveMode::kTorque, cfg.hold_torque, 0.0});
  const double w = 2.0 * std::numbers::pi / cfg.position_period;
  const double dt = sim.control_period();
  const auto skip = static_cast<std::int64_t>(std::llround(cfg.position_period / dt));
  const auto total =
      skip + static_cast<std::int64_t>(std::llround(config.calibration.surrogate_window / dt));
  std::array<double, 2> isq{};
  for (std::int64_t i = 0; i < total; ++i) {
    sim.send_command(DriveCommand{MotorId::kMotor2, DriveMode::kPositionPid,
                                  cfg.position_amplitude * std::sin(w * sim.now()),
                                  sim.now()});
    sim.tick();
    if (i < skip) continue;
    const sim::PlantState s = sim.state();
    for (std::size_t k = 0; k < 2; ++k) {
      const double amps = s.motors[k].applied_torque / config.plant.motors[k].kt;
      isq[k] += amps * amps;
    }
  }
  const auto n = static_cast<double>(total - skip);
  return {isq[0] / n, isq[1] / n};
}

CalibrationResult Calibrate(const ToolkitConfig& config,
                            const std::vector<std::string>& free_params) {
  for (const auto& name : free_params) {
    const auto known = KnownFreeParams();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw Error(ErrorCode::kCalibration, "unknown free parameter '" + name + "'");
    }
    if (std::count(free_params.begin(), free_params.end(), name) > 1) {
      throw Error(ErrorCode::kCalibration, "free parameter '" + name + "' listed twice");
    }
  }

  ToolkitConfig working = config;
  CalibrationResult result;
  std::vector<Prediction> all;

  for (const auto& group : Groups()) {
    std::vector<std::string> selected;
    for (const auto& p : group.params) {
      if (std::find(free_params.begin(), free_params.end(), p) != free_params.end()) {
        selected.push_back(p);
      }
    }
    const std::string name = group.name;
    std::function<std::vector<Prediction>(const sim::PlantParams&)> model;
    if (name == "torque") {
      model = [&](const sim::PlantParams& p) { return TorqueModel(working, p); };
    } else if (name == "battery") {
      const auto draws = SimulateBatteryDraw(working);
      model = [&, draws](const sim::PlantParams& p) { return BatteryModel(working, p, draws); };
    } else if (name == "thermal") {
      const auto isq = SimulateThermalCurrent(working);
      model = [&, isq](const sim::PlantParams& p) { return ThermalModel(working, p, isq); };
    } else {
      model = [&](const sim::PlantParams& p) { return AcousticModel(working, p); };
    }

    const std::size_t targets = model(working.plant).size();
    if (selected.size() > targets) {
      throw Error(ErrorCode::kCalibration,
                  std::string("underdetermined ") + group.name + " fit: " +
                      std::to_string(selected.size()) + " free parameters for " +
                      std::to_string(targets) + " targets");
    }
    if (!selected.empty()) {
      working.plant = Fit(selected, working.plant, model);
      for (const auto& p : selected) {
        result.fitted.emplace_back(p, Param(working.plant, p));
      }
    }
    const auto preds = model(working.plant);
    all.insert(all.end(), preds.begin(), preds.end());
  }

  working.plant.Validate();
  result.params = working.plant;
  for (const auto& p : all) {
    result.residuals.push_back(
        {p.target, p.target_value, p.model_value, RelativeError(p.model_value, p.target_value)});
  }
  return result;
}

}  // namespace tdu::report
