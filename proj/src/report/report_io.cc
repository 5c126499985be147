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

#include <charconv>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "tdu/report/csv.h"
#include "tdu/report/report.h"

namespace tdu::report {
namespace {

using nlohmann::json;
using orchestrator::CellType;
using orchestrator::Column;
using orchestrator::Table;

json Real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json Optional(const std::optional<double>& v) { return v ? Real(*v) : json(nullptr); }

json YamlToJson(const YAML::Node& n) {
  if (n.IsMap()) {
    json out = json::object();
    for (const auto& kv : n) out[kv.first.as<std::string>()] = YamlToJson(kv.second);
    return out;
  }
  if (n.IsSequence()) {
    json out = json::array();
    for (const auto& item : n) out.push_back(YamlToJson(item));
    return out;
  }
  if (!n.IsScalar()) return nullptr;
  const std::string& s = n.Scalar();
  if (s == "true") return true;
  if (s == "false") return false;
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && end == s.data() + s.size()) return v;
  return s;
}

std::vector<Column> Schema(std::initializer_list<std::pair<const char*, CellType>> cols) {
  std::vector<Column> out;
  for (const auto& [name, type] : cols) out.push_back({name, type});
  return out;
}

const std::vector<Column>& FitsSchema() {
  static const auto s = Schema({{"motor", CellType::kInteger},
                                {"slope", CellType::kReal},
                                {"intercept", CellType::kReal},
                                {"r_squared", CellType::kReal}});
  return s;
}
const std::vector<Column>& SpreadsSchema() {
  static const auto s = Schema({{"motor", CellType::kInteger},
                                {"commanded_nm", CellType::kReal},
                                {"mean_nm", CellType::kReal},
                                {"sd_nm", CellType::kReal}});
  return s;
}
const std::vector<Column>& BodeSchema() {
  static const auto s = Schema({{"amplitude_rad_s", CellType::kReal},
                                {"freq_hz", CellType::kReal},
                                {"gain_db", CellType::kReal},
                                {"phase_deg", CellType::kReal}});
  return s;
}
const std::vector<Column>& BodePerMotorSchema() {
  static const auto s = Schema({{"motor", CellType::kInteger},
                                {"amplitude_rad_s", CellType::kReal},
                                {"freq_hz", CellType::kReal},
                                {"gain_db", CellType::kReal},
                                {"phase_deg", CellType::kReal},
                                {"diverged", CellType::kBool}});
  return s;
}
const std::vector<Column>& ThermalTimesSchema() {
  static const auto s = Schema({{"phase", CellType::kInteger},
                                {"fans_on", CellType::kBool},
                                {"hottest_motor", CellType::kInteger},
                                {"reached_cutoff", CellType::kBool},
                                {"rise_s", CellType::kReal},
                                {"fall_s", CellType::kReal},
                                {"fall_secondary_s", CellType::kReal},
                                {"peak_c", CellType::kReal}});
  return s;
}
const std::vector<Column>& NoiseSchema() {
  static const auto s = Schema({{"condition", CellType::kText},
                                {"speed_rad_s", CellType::kReal},
                                {"leq_db", CellType::kReal},
                                {"floor_subtracted", CellType::kBool}});
  return s;
}
const std::vector<Column>& RuntimeSchema() {
  static const auto s = Schema({{"load_kg", CellType::kReal},
                                {"runtime_s", CellType::kReal},
                                {"runtime_hms", CellType::kText},
                                {"torque_mean_nm", CellType::kReal},
                                {"torque_sd_nm", CellType::kReal},
                                {"mean_power_w", CellType::kReal}});
  return s;
}

// Telemetry schemas mirror the tables the orchestrator builds.
std::vector<Column> TelemetrySchema(Protocol p) {
  switch (p) {
    case Protocol::kStaticTorque:
      return Schema({{"motor", CellType::kInteger},
                     {"repetition", CellType::kInteger},
                     {"t", CellType::kReal},
                     {"commanded_nm", CellType::kReal},
                     {"tension_n", CellType::kReal},
                     {"measured_nm", CellType::kReal},
                     {"drive_torque_nm", CellType::kReal},
                     {"current_a", CellType::kReal}});
    case Protocol::kVelocitySweep:
      return Schema({{"amplitude_rad_s", CellType::kReal},
                     {"freq_hz", CellType::kReal},
                     {"t", CellType::kReal},
                     {"reference_rad_s", CellType::kReal},
                     {"velocity_m1_rad_s", CellType::kReal},
                     {"velocity_m2_rad_s", CellType::kReal}});
    case Protocol::kThermal:
      return Schema({{"phase", CellType::kInteger},
                     {"fans_on", CellType::kBool},
                     {"stage", CellType::kText},
                     {"t", CellType::kReal},
                     {"temp_m1_c", CellType::kReal},
                     {"temp_m2_c", CellType::kReal},
                     {"torque_m1_nm", CellType::kReal},
                     {"torque_m2_nm", CellType::kReal}});
    case Protocol::kNoise:
      return Schema({{"condition", CellType::kText},
                     {"speed_rad_s", CellType::kReal},
                     {"t", CellType::kReal},
                     {"velocity_m1_rad_s", CellType::kReal},
                     {"velocity_m2_rad_s", CellType::kReal}});
    case Protocol::kBattery:
      return Schema({{"load_kg", CellType::kReal},
                     {"t", CellType::kReal},
                     {"pack_voltage_v", CellType::kReal},
                     {"torque_m1_nm", CellType::kReal},
                     {"torque_m2_nm", CellType::kReal}});
  }
  return {};
}

std::int64_t MotorCell(MotorId m) { return static_cast<std::int64_t>(m); }

}  // namespace

std::string_view ProtocolName(Protocol p) {
  switch (p) {
    case Protocol::kStaticTorque: return "static_torque";
    case Protocol::kVelocitySweep: return "velocity_sweep";
    case Protocol::kThermal: return "thermal";
    case Protocol::kNoise: return "noise";
    case Protocol::kBattery: return "battery";
  }
  return "unknown";
}

std::optional<Protocol> ParseProtocol(std::string_view name) {
  std::string normalized(name);
  for (char& c : normalized) {
    if (c == '-') c = '_';
  }
  for (Protocol p : kAllProtocols) {
    if (ProtocolName(p) == normalized) return p;
  }
  return std::nullopt;
}

std::string FormatHms(double seconds) {
  const auto total = static_cast<long long>(std::llround(seconds));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld", total / 3600, (total / 60) % 60,
                total % 60);
  return buf;
}

Table FitsTable(const orchestrator::StaticTorqueResult& r) {
  Table t{FitsSchema(), {}};
  for (const auto& f : r.fits) {
    t.Add({MotorCell(f.motor), f.fit.slope, f.fit.intercept, f.fit.r_squared});
  }
  return t;
}

Table SpreadsTable(const orchestrator::StaticTorqueResult& r) {
  Table t{SpreadsSchema(), {}};
  for (const auto& s : r.spreads) t.Add({MotorCell(s.motor), s.commanded, s.mean, s.sd});
  return t;
}

Table BodeTable(const std::vector<analysis::BodePoint>& points) {
  Table t{BodeSchema(), {}};
  for (const auto& p : points) t.Add({p.amplitude, p.frequency, p.gain_db, p.phase_deg});
  return t;
}

Table BodePerMotorTable(const orchestrator::VelocitySweepResult& r) {
  Table t{BodePerMotorSchema(), {}};
  for (MotorId m : kMotors) {
    for (const auto& p : r.points) {
      const auto& gp = p.per_motor[Index(m)];
      t.Add({MotorCell(m), p.amplitude, p.frequency, gp.gain_db, gp.phase_deg, p.diverged});
    }
  }
  return t;
}

Table ThermalTimesTable(const orchestrator::ThermalResult& r) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  Table t{ThermalTimesSchema(), {}};
  for (std::size_t i = 0; i < r.phases.size(); ++i) {
    const auto& p = r.phases[i];
    t.Add({static_cast<std::int64_t>(i), p.fans_on, MotorCell(p.hottest), p.reached_cutoff,
           p.rise.value_or(kNaN), p.fall.value_or(kNaN), p.fall_secondary.value_or(kNaN),
           p.peak_temp});
  }
  return t;
}

Table NoiseTable(const orchestrator::NoiseResult& r) {
  Table t{NoiseSchema(), {}};
  for (const auto& m : r.measurements) {
    t.Add({orchestrator::NoiseConditionName(m.condition), m.speed, m.level_db,
           m.floor_subtracted});
  }
  return t;
}

Table RuntimeTable(const orchestrator::BatteryResult& r) {
  Table t{RuntimeSchema(), {}};
  for (const auto& c : r.conditions) {
    t.Add({c.load, c.runtime, FormatHms(c.runtime), c.torque.mean, c.torque.sd,
           c.mean_power});
  }
  return t;
}

std::vector<std::pair<std::string, std::vector<Column>>> OutputSchemas(Protocol p) {
  std::vector<std::pair<std::string, std::vector<Column>>> out{
      {"telemetry.csv", TelemetrySchema(p)}};
  switch (p) {
    case Protocol::kStaticTorque:
      out.push_back({"fits.csv", FitsSchema()});
      out.push_back({"spreads.csv", SpreadsSchema()});
      break;
    case Protocol::kVelocitySweep:
      out.push_back({"bode.csv", BodeSchema()});
      out.push_back({"bode_per_motor.csv", BodePerMotorSchema()});
      break;
    case Protocol::kThermal:
      out.push_back({"thermal_times.csv", ThermalTimesSchema()});
      break;
    case Protocol::kNoise:
      out.push_back({"noise.csv", NoiseSchema()});
      break;
    case Protocol::kBattery:
      out.push_back({"torque.csv", Schema({{"load_kg", CellType::kReal},
                                           {"t", CellType::kReal},
                                           {"torque_m1_nm", CellType::kReal},
                                           {"torque_m2_nm", CellType::kReal}})});
      out.push_back({"runtime.csv", RuntimeSchema()});
      break;
  }
  return out;
}

namespace {

std::vector<std::pair<std::string, const Table*>> Tables(const TestReport& report,
                                                        std::vector<Table>& storage) {
  storage.clear();
  storage.reserve(4);
  std::vector<std::pair<std::string, const Table*>> out;
  auto add = [&](const char* name, Table t) {
    storage.push_back(std::move(t));
    out.emplace_back(name, &storage.back());
  };
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        out.emplace_back("telemetry.csv", &r.telemetry);
        if constexpr (std::is_same_v<T, orchestrator::StaticTorqueResult>) {
          add("fits.csv", FitsTable(r));
          add("spreads.csv", SpreadsTable(r));
        } else if constexpr (std::is_same_v<T, orchestrator::VelocitySweepResult>) {
          add("bode.csv", BodeTable(r.bode()));
          add("bode_per_motor.csv", BodePerMotorTable(r));
        } else if constexpr (std::is_same_v<T, orchestrator::ThermalResult>) {
          add("thermal_times.csv", ThermalTimesTable(r));
        } else if constexpr (std::is_same_v<T, orchestrator::NoiseResult>) {
          add("noise.csv", NoiseTable(r));
        } else {
          out.emplace_back("torque.csv", &r.torque_log);
          add("runtime.csv", RuntimeTable(r));
        }
      },
      report.result);
  return out;
}

json Metrics(const TestReport& report) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        json m = json::object();
        if constexpr (std::is_same_v<T, orchestrator::StaticTorqueResult>) {
          m["measurements"] = r.telemetry.rows.size();
          m["fits"] = json::array();
          for (const auto& f : r.fits) {
            m["fits"].push_back({{"motor", MotorCell(f.motor)},
                                 {"slope", Real(f.fit.slope)},
                                 {"intercept", Real(f.fit.intercept)},
                                 {"r_squared", Real(f.fit.r_squared)}});
          }
          m["spreads"] = json::array();
          for (const auto& s : r.spreads) {
            m["spreads"].push_back({{"motor", MotorCell(s.motor)},
                                    {"commanded_nm", Real(s.commanded)},
                                    {"mean_nm", Real(s.mean)},
                                    {"sd_nm", Real(s.sd)}});
          }
        } else if constexpr (std::is_same_v<T, orchestrator::VelocitySweepResult>) {
          m["average_motors"] = r.average_motors;
          m["points"] = json::array();
          const auto bode = r.bode();
          for (std::size_t i = 0; i < r.points.size(); ++i) {
            const auto& p = r.points[i];
            m["points"].push_back(
                {{"amplitude_rad_s", Real(p.amplitude)},
                 {"freq_hz", Real(p.frequency)},
                 {"gain_db", Real(bode[i].gain_db)},
                 {"phase_deg", Real(bode[i].phase_deg)},
                 {"diverged", p.diverged},
                 {"motor1", {{"gain_db", Real(p.per_motor[0].gain_db)},
                             {"phase_deg", Real(p.per_motor[0].phase_deg)}}},
                 {"motor2", {{"gain_db", Real(p.per_motor[1].gain_db)},
                             {"phase_deg", Real(p.per_motor[1].phase_deg)}}}});
          }
        } else if constexpr (std::is_same_v<T, orchestrator::ThermalResult>) {
          m["phases"] = json::array();
          for (const auto& p : r.phases) {
            m["phases"].push_back({{"fans_on", p.fans_on},
                                   {"reached_cutoff", p.reached_cutoff},
                                   {"status", p.reached_cutoff ? "ok" : "no rise"},
                                   {"hottest_motor", MotorCell(p.hottest)},
                                   {"rise_s", Optional(p.rise)},
                                   {"fall_s", Optional(p.fall)},
                                   {"fall_secondary_s", Optional(p.fall_secondary)},
                                   {"peak_temp_c", Real(p.peak_temp)},
                                   {"final_temp_c", Real(p.final_temp)}});
          }
        } else if constexpr (std::is_same_v<T, orchestrator::NoiseResult>) {
          m["measurements"] = json::array();
          for (const auto& x : r.measurements) {
            m["measurements"].push_back(
                {{"condition", orchestrator::NoiseConditionName(x.condition)},
                 {"speed_rad_s", Real(x.speed)},
                 {"raw_db", Real(x.raw_db)},
                 {"leq_db", Real(x.level_db)},
                 {"floor_subtracted", x.floor_subtracted}});
          }
        } else {
          m["conditions"] = json::array();
          for (const auto& c : r.conditions) {
            m["conditions"].push_back({{"load_kg", Real(c.load)},
                                       {"runtime_s", Real(c.runtime)},
                                       {"runtime_hms", FormatHms(c.runtime)},
                                       {"torque_mean_nm", Real(c.torque.mean)},
                                       {"torque_sd_nm", Real(c.torque.sd)},
                                       {"mean_power_w", Real(c.mean_power)}});
          }
        }
        return m;
      },
      report.result);
}

}  // namespace

std::string ReportJson(const TestReport& report, const ToolkitConfig& config) {
  const std::string name(ProtocolName(report.protocol));
  const YAML::Node dumped = YAML::Load(DumpConfig(config));
  json j;
  j["protocol"] = name;
  j["toolkit_version"] = report.provenance.version;
  j["backend"] = report.provenance.backend;
  j["seed"] = report.provenance.seed;
  j["config_hash"] = report.provenance.config_hash;
  j["config"] = {{name, YamlToJson(dumped[name])},
                 {"plant", YamlToJson(dumped["plant"])},
                 {"drive", YamlToJson(dumped["drive"])},
                 {"sensor_noise", YamlToJson(dumped["sensor_noise"])}};
  j["telemetry"] = "telemetry.csv";
  std::vector<Table> storage;
  json files = json::array();
  for (const auto& [file, table] : Tables(report, storage)) files.push_back(file);
  j["files"] = files;
  j["metrics"] = Metrics(report);
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> WriteReport(const TestReport& report,
                                               const ToolkitConfig& config,
                                               const std::filesystem::path& dir) {
  const std::filesystem::path sub(std::string(ProtocolName(report.protocol)));
  std::vector<std::filesystem::path> written;
  std::vector<Table> storage;
  for (const auto& [file, table] : Tables(report, storage)) {
    WriteCsv(*table, dir / sub / file);
    written.push_back(sub / file);
  }
  WriteFile(dir / sub / "report.json", ReportJson(report, config));
  written.push_back(sub / "report.json");
  return written;
}

}  // namespace tdu::report
