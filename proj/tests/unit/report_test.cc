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


#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "tdu/report/csv.h"
#include "tdu/report/report.h"
#include "tdu/report/runner.h"

namespace tdu::report {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

ToolkitConfig ShortConfig() {
  ToolkitConfig c;
  c.noise.window = 2.0;
  c.noise.spin_up = 1.0;
  c.noise.speeds = {5.0, 30.0};
  c.static_torque.settle = 2.0;
  c.static_torque.repetitions = 2;
  c.static_torque.torque_levels = {0.5, 1.0, 1.5};
  return c;
}

TEST(Report, ProtocolNames) {
  for (Protocol p : kAllProtocols) {
    EXPECT_EQ(ParseProtocol(ProtocolName(p)), p);
  }
  EXPECT_EQ(ParseProtocol("velocity-sweep"), Protocol::kVelocitySweep);
  EXPECT_EQ(ParseProtocol("static-torque"), Protocol::kStaticTorque);
  EXPECT_EQ(ProtocolName(Protocol::kVelocitySweep), "velocity_sweep");
  EXPECT_FALSE(ParseProtocol("sweep").has_value());
}

TEST(Report, FormatHms) {
  EXPECT_EQ(FormatHms(0.0), "00:00:00");
  EXPECT_EQ(FormatHms(40823.0), "11:20:23");
  EXPECT_EQ(FormatHms(9500.0), "02:38:20");
  EXPECT_EQ(FormatHms(59.5), "00:01:00");
  EXPECT_EQ(FormatHms(100.0 * 3600.0), "100:00:00");
}

TEST(Report, JsonCarriesProvenanceAndMetrics) {
  const ToolkitConfig config = ShortConfig();
  RunOptions options;
  options.seed = 11;
  const TestReport report = RunProtocol(Protocol::kNoise, config, options);
  const json j = json::parse(ReportJson(report, config));
  EXPECT_EQ(j.at("protocol"), "noise");
  EXPECT_EQ(j.at("backend"), "sim");
  EXPECT_EQ(j.at("seed"), 11);
  EXPECT_EQ(j.at("toolkit_version"), TDU_VERSION);
  EXPECT_EQ(j.at("config_hash"), Sha256Hex(DumpConfig(config)));
  EXPECT_EQ(j.at("config").at("noise").at("window"), 2.0);
  EXPECT_TRUE(j.at("config").contains("plant"));
  EXPECT_EQ(j.at("telemetry"), "telemetry.csv");
  EXPECT_EQ(j.at("files"), json({"telemetry.csv", "noise.csv"}));
  EXPECT_EQ(j.at("metrics").at("measurements").size(), 2u + 3u * 2u);
}

TEST(Report, WrittenFilesReparseWithSchemas) {
  const ToolkitConfig config = ShortConfig();
  const fs::path dir = fs::temp_directory_path() / "tdu_report_test";
  fs::remove_all(dir);
  RunOptions options;
  options.seed = 3;
  for (Protocol p : {Protocol::kStaticTorque, Protocol::kNoise}) {
    const TestReport report = RunProtocol(p, config, options);
    const auto written = WriteReport(report, config, dir);
    const auto schemas = OutputSchemas(p);
    ASSERT_EQ(written.size(), schemas.size() + 1);
    for (const auto& [file, schema] : schemas) {
      const fs::path path = dir / std::string(ProtocolName(p)) / file;
      const orchestrator::Table table = ReadCsv(path, schema);
      EXPECT_FALSE(table.rows.empty()) << path;
      EXPECT_EQ(FormatCsv(table), ReadFile(path)) << path;
    }
    EXPECT_TRUE(fs::exists(dir / std::string(ProtocolName(p)) / "report.json"));
  }
  fs::remove_all(dir);
}

TEST(Report, BodeTableHasOneRowPerGridPoint) {
  ToolkitConfig config;
  orchestrator::VelocitySweepResult r;
  for (double a : config.velocity_sweep.amplitudes) {
    for (double f : config.velocity_sweep.frequencies) {
      orchestrator::SweepPoint p;
      p.amplitude = a;
      p.frequency = f;
      r.points.push_back(p);
    }
  }
  EXPECT_EQ(BodeTable(r.bode()).rows.size(), 120u);
  EXPECT_EQ(BodePerMotorTable(r).rows.size(), 240u);
}

}  // namespace
}  // namespace tdu::report
