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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tdu/orchestrator/protocols.h"
#include "tdu/report/config.h"

namespace tdu::report {

enum class Protocol : std::uint8_t {
  kStaticTorque,
  kVelocitySweep,
  kThermal,
  kNoise,
  kBattery,
};

inline constexpr Protocol kAllProtocols[] = {
    Protocol::kStaticTorque, Protocol::kVelocitySweep, Protocol::kThermal,
    Protocol::kNoise, Protocol::kBattery};

/// Directory and JSON name, e.g. "velocity_sweep".
std::string_view ProtocolName(Protocol p);
/// Accepts the directory name or the CLI spelling ("velocity-sweep").
std::optional<Protocol> ParseProtocol(std::string_view name);

struct Provenance {
  std::string backend;
  std::uint64_t seed = 0;
  std::string version;
  std::string config_hash;
};

using ProtocolResult =
    std::variant<orchestrator::StaticTorqueResult, orchestrator::VelocitySweepResult,
                 orchestrator::ThermalResult, orchestrator::NoiseResult,
                 orchestrator::BatteryResult>;

struct TestReport {
  Protocol protocol = Protocol::kStaticTorque;
  Provenance provenance;
  ProtocolResult result;
};

// Metric tables. Column names and order are part of the output contract.
orchestrator::Table FitsTable(const orchestrator::StaticTorqueResult& r);
orchestrator::Table SpreadsTable(const orchestrator::StaticTorqueResult& r);
orchestrator::Table BodeTable(const std::vector<analysis::BodePoint>& points);
orchestrator::Table BodePerMotorTable(const orchestrator::VelocitySweepResult& r);
orchestrator::Table ThermalTimesTable(const orchestrator::ThermalResult& r);
orchestrator::Table NoiseTable(const orchestrator::NoiseResult& r);
orchestrator::Table RuntimeTable(const orchestrator::BatteryResult& r);

/// Header schema of each file a protocol writes, keyed by file name.
std::vector<std::pair<std::string, std::vector<orchestrator::Column>>> OutputSchemas(
    Protocol p);

/// "HH:MM:SS", rounded to the nearest second.
std::string FormatHms(double seconds);

std::string ReportJson(const TestReport& report, const ToolkitConfig& config);

/// Writes <dir>/<protocol>/{telemetry.csv, metric tables, report.json};
/// returns the paths written, relative to `dir`.
std::vector<std::filesystem::path> WriteReport(const TestReport& report,
                                               const ToolkitConfig& config,
                                               const std::filesystem::path& dir);

}  // namespace tdu::report
