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

#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "tdu/report/config.h"

namespace tdu::report {
namespace {

using orchestrator::NoiseCondition;

// Field lists shared by the emitter and the loader. Order here is the
// order of the dumped file.

template <class V>
void Visit(V& v, sim::MotorParams& p) {
  v.Field("kt", p.kt);
  v.Field("rated_torque", p.rated_torque);
  v.Field("peak_torque", p.peak_torque);
  v.Field("torque_gain", p.torque_gain);
  v.Field("torque_offset", p.torque_offset);
  v.Field("stiction", p.stiction);
  v.Field("cogging_amplitude", p.cogging_amplitude);
  v.Field("cogging_cycles_per_rev", p.cogging_cycles_per_rev);
  v.Field("rotor_inertia", p.rotor_inertia);
  v.Field("viscous_friction", p.viscous_friction);
  v.Field("winding_resistance", p.winding_resistance);
}

template <class V>
void Visit(V& v, sim::ThermalParams& p) {
  v.Field("heat_capacity", p.heat_capacity);
  v.Field("r_th_fans_on", p.r_th_fans_on);
  v.Field("r_th_fans_off", p.r_th_fans_off);
  v.Field("ambient", p.ambient);
}

template <class V>
void Visit(V& v, sim::BatteryParams& p) {
  v.Field("full_voltage", p.full_voltage);
  v.Field("cutoff_voltage", p.cutoff_voltage);
  v.Field("usable_energy", p.usable_energy);
  v.Field("idle_power", p.idle_power);
  v.Field("soc_voltage_curve", p.soc_voltage_curve);
}

template <class V>
void Visit(V& v, sim::AcousticParams& p) {
  v.Field("room_floor", p.room_floor);
  v.Field("fans_level", p.fans_level);
  v.Field("motor_ref_level", p.motor_ref_level);
  v.Field("motor_ref_speed", p.motor_ref_speed);
  v.Field("motor_slope", p.motor_slope);
}

template <class V>
void Visit(V& v, sim::PlantParams& p) {
  v.Field("dt", p.dt);
  v.Field("pulley_radius", p.pulley_radius);
  v.Field("gravity", p.gravity);
  v.Field("redirect_friction", p.redirect_friction);
  v.Field("cable_stiffness", p.cable_stiffness);
  v.Field("cable_damping", p.cable_damping);
  v.Section("motor1", p.motors[0]);
  v.Section("motor2", p.motors[1]);
  v.Section("thermal", p.thermal);
  v.Section("battery", p.battery);
  v.Section("acoustic", p.acoustic);
}

template <class V>
void Visit(V& v, hal::PidGains& g) {
  v.Field("kp", g.kp);
  v.Field("ki", g.ki);
  v.Field("kd", g.kd);
  v.Field("integral_limit", g.integral_limit);
}

template <class V>
void Visit(V& v, hal::DriveSettings& d) {
  v.Section("velocity_gains", d.velocity_gains);
  v.Section("position_gains", d.position_gains);
  v.Field("max_velocity", d.max_velocity);
  v.Field("telemetry_period", d.telemetry_period);
}

template <class V>
void Visit(V& v, hal::SensorNoise& n) {
  v.Field("tension", n.tension);
  v.Field("temperature", n.temperature);
  v.Field("acoustic", n.acoustic);
}

template <class V>
void Visit(V& v, orchestrator::StaticTorqueConfig& c) {
  v.Field("torque_levels", c.torque_levels);
  v.Field("settle", c.settle);
  v.Field("repetitions", c.repetitions);
  v.Field("pulley_radius", c.pulley_radius);
  v.Field("motors", c.motors);
}

template <class V>
void Visit(V& v, orchestrator::VelocitySweepConfig& c) {
  v.Field("amplitudes", c.amplitudes);
  v.Field("frequencies", c.frequencies);
  v.Field("cycles_per_point", c.cycles_per_point);
  v.Field("average_motors", c.average_motors);
  v.Field("max_sample_period", c.max_sample_period);
  v.Field("min_samples_per_cycle", c.min_samples_per_cycle);
}

template <class V>
void Visit(V& v, orchestrator::ThermalConfig& c) {
  v.Field("hold_torque", c.hold_torque);
  v.Field("position_amplitude", c.position_amplitude);
  v.Field("position_period", c.position_period);
  v.Field("cutoff_temp", c.cutoff_temp);
  v.Field("rise_from", c.rise_from);
  v.Field("fall_to", c.fall_to);
  v.Field("fall_secondary", c.fall_secondary);
  v.Field("pre_settle", c.pre_settle);
  v.Field("max_heat", c.max_heat);
  v.Field("max_cool", c.max_cool);
  v.Field("safety_margin", c.safety_margin);
  v.Field("log_period", c.log_period);
  v.Field("phase_fans", c.phase_fans);
}

template <class V>
void Visit(V& v, orchestrator::NoiseConfig& c) {
  v.Field("window", c.window);
  v.Field("speeds", c.speeds);
  v.Field("conditions", c.conditions);
  v.Field("spin_up", c.spin_up);
  v.Field("log_period", c.log_period);
  v.Field("fans_with_motors", c.fans_with_motors);
}

template <class V>
void Visit(V& v, orchestrator::BatteryConfig& c) {
  v.Field("loads", c.loads);
  v.Field("position_amplitude", c.position_amplitude);
  v.Field("position_period", c.position_period);
  v.Field("start_voltage", c.start_voltage);
  v.Field("cutoff", c.cutoff);
  v.Field("max_duration", c.max_duration);
  v.Field("log_period", c.log_period);
  v.Field("torque_window", c.torque_window);
  v.Field("torque_period", c.torque_period);
}

template <class V>
void Visit(V& v, CalibrationTargets& t) {
  v.Field("runtimes", t.runtimes);
  v.Field("rise_fans_off", t.rise_fans_off);
  v.Field("rise_fans_on", t.rise_fans_on);
  v.Field("fall_fans_on", t.fall_fans_on);
  v.Field("fall_fans_off_to_40", t.fall_fans_off_to_40);
  v.Field("fans_only_db", t.fans_only_db);
  v.Field("single_motor_db", t.single_motor_db);
  v.Field("single_motor_speed", t.single_motor_speed);
  v.Field("both_motors_db", t.both_motors_db);
  v.Field("both_motors_speed", t.both_motors_speed);
  v.Field("torque_gain", t.torque_gain);
  v.Field("torque_offset", t.torque_offset);
}

template <class V>
void Visit(V& v, CalibrationConfig& c) {
  v.Section("targets", c.targets);
  v.Field("free_params", c.free_params);
  v.Field("surrogate_window", c.surrogate_window);
}

template <class V>
void Visit(V& v, ToolkitConfig& c) {
  v.Section("plant", c.plant);
  v.Section("drive", c.drive);
  v.Section("sensor_noise", c.sensor_noise);
  v.Section("static_torque", c.static_torque);
  v.Section("velocity_sweep", c.velocity_sweep);
  v.Section("thermal", c.thermal);
  v.Section("noise", c.noise);
  v.Section("battery", c.battery);
  v.Section("calibration", c.calibration);
}

// Emitter --------------------------------------------------------------------

std::string FormatDouble(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), end);
  if (s.find_first_of(".einf") == std::string::npos) s += ".0";
  return s;
}

class Emitter {
 public:
  std::string str() const { return out_.str(); }

  void Field(const char* key, double& v) { Line(key, FormatDouble(v)); }
  void Field(const char* key, int& v) { Line(key, std::to_string(v)); }
  void Field(const char* key, bool& v) { Line(key, v ? "true" : "false"); }
  void Field(const char* key, std::vector<double>& v) {
    List(key, v, [](double x) { return FormatDouble(x); });
  }
  void Field(const char* key, std::vector<bool>& v) {
    std::vector<std::string> s;
    for (bool b : v) s.push_back(b ? "true" : "false");
    List(key, s, [](const std::string& x) { return x; });
  }
  void Field(const char* key, std::vector<MotorId>& v) {
    List(key, v, [](MotorId m) { return std::to_string(static_cast<int>(m)); });
  }
  void Field(const char* key, std::vector<NoiseCondition>& v) {
    List(key, v, [](NoiseCondition c) { return orchestrator::NoiseConditionName(c); });
  }
  void Field(const char* key, std::vector<std::string>& v) {
    List(key, v, [](const std::string& x) { return x; });
  }
  void Field(const char* key, std::vector<sim::SocVoltagePoint>& v) {
    List(key, v, [](const sim::SocVoltagePoint& p) {
      return "[" + FormatDouble(p.soc) + ", " + FormatDouble(p.voltage) + "]";
    });
  }
  void Field(const char* key, std::vector<std::pair<double, double>>& v) {
    List(key, v, [](const std::pair<double, double>& p) {
      return "[" + FormatDouble(p.first) + ", " + FormatDouble(p.second) + "]";
    });
  }

  template <class T>
  void Section(const char* key, T& obj) {
    Indent();
    out_ << key << ":\n";
    ++depth_;
    Visit(*this, obj);
    --depth_;
  }

 private:
  void Indent() {
    for (int i = 0; i < depth_; ++i) out_ << "  ";
  }
  void Line(const char* key, const std::string& value) {
    Indent();
    out_ << key << ": " << value << "\n";
  }
  template <class T, class F>
  void List(const char* key, const std::vector<T>& v, F format) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) s += ", ";
      s += format(v[i]);
    }
    Line(key, s + "]");
  }

  std::ostringstream out_;
  int depth_ = 0;
};

// Loader ---------------------------------------------------------------------

[[noreturn]] void Bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfig, "config key '" + path + "': " + what);
}

template <class T>
T Scalar(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) Bad(path, "expected a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    Bad(path, "cannot parse '" + n.Scalar() + "'");
  }
}

class Loader {
 public:
  Loader(YAML::Node node, std::string prefix)
      : node_(std::move(node)), prefix_(std::move(prefix)) {
    if (!node_.IsMap()) Bad(prefix_.empty() ? "<root>" : prefix_, "expected a mapping");
  }

  void Field(const char* key, double& v) {
    if (auto n = Get(key)) v = Scalar<double>(n, Path(key));
  }
  void Field(const char* key, int& v) {
    if (auto n = Get(key)) v = Scalar<int>(n, Path(key));
  }
  void Field(const char* key, bool& v) {
    if (auto n = Get(key)) v = Scalar<bool>(n, Path(key));
  }
  void Field(const char* key, std::vector<double>& v) {
    Seq(key, v, [&](const YAML::Node& n, const std::string& p) { return Scalar<double>(n, p); });
  }
  void Field(const char* key, std::vector<bool>& v) {
    Seq(key, v, [&](const YAML::Node& n, const std::string& p) { return Scalar<bool>(n, p); });
  }
  void Field(const char* key, std::vector<MotorId>& v) {
    Seq(key, v, [&](const YAML::Node& n, const std::string& p) {
      const int id = Scalar<int>(n, p);
      if (id != 1 && id != 2) Bad(p, "motor must be 1 or 2");
      return static_cast<MotorId>(id);
    });
  }
  void Field(const char* key, std::vector<NoiseCondition>& v) {
    Seq(key, v, [&](const YAML::Node& n, const std::string& p) {
      try {
        return orchestrator::ParseNoiseCondition(Scalar<std::string>(n, p));
      } catch (const Error& e) {
        Bad(p, e.what());
      }
    });
  }
  void Field(const char* key, std::vector<std::string>& v) {
    Seq(key, v,
        [&](const YAML::Node& n, const std::string& p) { return Scalar<std::string>(n, p); });
  }
  void Field(const char* key, std::vector<sim::SocVoltagePoint>& v) {
    Seq(key, v, [&](const YAML::Node& n, const std::string& p) {
      const auto pair = Pair(n, p);
      return sim::SocVoltagePoint{pair.first, pair.second};
    });
  }
  void Field(const char* key, std::vector<std::pair<double, double>>& v) {
    Seq(key, v, [&](const YAML::Node& n, const std::string& p) { return Pair(n, p); });
  }

  template <class T>
  void Section(const char* key, T& obj) {
    if (auto n = Get(key)) {
      Loader sub(n, Path(key));
      Visit(sub, obj);
      sub.RejectUnknown();
    }
  }

  void RejectUnknown() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) Bad(Path(key.c_str()), "unknown key");
    }
  }

 private:
  std::string Path(const char* key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + key;
  }
  YAML::Node Get(const char* key) {
    seen_.insert(key);
    YAML::Node n = node_[key];
    if (!n.IsDefined() || n.IsNull()) return YAML::Node(YAML::NodeType::Undefined);
    return n;
  }
  std::pair<double, double> Pair(const YAML::Node& n, const std::string& p) {
    if (!n.IsSequence() || n.size() != 2) Bad(p, "expected a two-element list");
    return {Scalar<double>(n[0], p + "[0]"), Scalar<double>(n[1], p + "[1]")};
  }
  template <class T, class F>
  void Seq(const char* key, std::vector<T>& out, F parse) {
    auto n = Get(key);
    if (!n) return;
    const std::string p = Path(key);
    if (!n.IsSequence()) Bad(p, "expected a list");
    std::vector<T> v;
    for (std::size_t i = 0; i < n.size(); ++i) {
      v.push_back(parse(n[i], p + "[" + std::to_string(i) + "]"));
    }
    out = std::move(v);
  }

  YAML::Node node_;
  std::string prefix_;
  std::set<std::string> seen_;
};

}  // namespace

void ToolkitConfig::Validate() const {
  plant.Validate();
  drive.Validate();
  sensor_noise.Validate();
  static_torque.Validate();
  velocity_sweep.Validate();
  thermal.Validate();
  noise.Validate();
  battery.Validate();
  if (thermal.hold_torque > plant.motors[0].rated_torque) {
    throw Error(ErrorCode::kConfig, "thermal.hold_torque exceeds motor1 rated torque");
  }
  if (!(calibration.surrogate_window > 0.0)) {
    throw Error(ErrorCode::kConfig, "calibration.surrogate_window must be positive");
  }
  const auto& t = calibration.targets;
  if (t.torque_gain.size() != 2 || t.torque_offset.size() != 2) {
    throw Error(ErrorCode::kConfig,
                "calibration.targets torque_gain and torque_offset need two entries");
  }
}

std::string DumpConfig(const ToolkitConfig& config) {
  ToolkitConfig copy = config;
  Emitter e;
  Visit(e, copy);
  return e.str();
}

ToolkitConfig LoadConfig(std::string_view yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed YAML: ") + e.what());
  }
  ToolkitConfig config;
  if (root.IsDefined() && !root.IsNull()) {
    Loader loader(root, "");
    Visit(loader, config);
    loader.RejectUnknown();
  }
  config.thermal.rated_torque = config.plant.motors[0].rated_torque;
  config.Validate();
  return config;
}

ToolkitConfig LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return LoadConfig(text.str());
}

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace tdu::report
