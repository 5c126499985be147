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

#include "tdu/report/runner.h"

#include <chrono>
#include <ctime>
#include <memory>

#include <nlohmann/json.hpp>

#include "tdu/hal/frame_backend.h"
#include "tdu/hal/sim_backend.h"
#include "tdu/report/csv.h"

namespace tdu::report {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Backend plus the simulated bench around it.
struct Rig {
  std::unique_ptr<hal::SimBackend> sim;
  hal::FrameRig frame;
  hal::Drive* drive = nullptr;
  hal::Bench* bench = nullptr;
};

Rig MakeRig(const ToolkitConfig& config, const RunOptions& options) {
  Rig rig;
  const bool paced = !options.accelerate;
  if (options.backend == hal::BackendKind::kSim) {
    rig.sim = std::make_unique<hal::SimBackend>(config.plant, config.drive,
                                                config.sensor_noise, options.seed, paced);
    rig.drive = rig.sim.get();
    rig.bench = rig.sim.get();
  } else {
    rig.frame = hal::MakeFrameRig(config.plant, config.drive, config.sensor_noise,
                                  options.seed, paced);
    rig.drive = rig.frame.drive.get();
    rig.bench = rig.frame.sim.get();
  }
  return rig;
}

json ReadJson(const fs::path& path) {
  try {
    return json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
}

}  // namespace

TestReport RunProtocol(Protocol protocol, const ToolkitConfig& config,
                       const RunOptions& options) {
  config.Validate();
  Rig rig = MakeRig(config, options);
  orchestrator::RunContext ctx{options.stop, options.progress};

  TestReport report;
  report.protocol = protocol;
  report.provenance.backend = std::string(hal::BackendKindName(options.backend));
  report.provenance.seed = options.seed;
  report.provenance.version = TDU_VERSION;
  report.provenance.config_hash = Sha256Hex(DumpConfig(config));

  orchestrator::ThermalConfig thermal = config.thermal;
  thermal.rated_torque = config.plant.motors[0].rated_torque;

  switch (protocol) {
    case Protocol::kStaticTorque:
      report.result =
          orchestrator::run_static_torque(config.static_torque, *rig.drive, *rig.bench, ctx);
      break;
    case Protocol::kVelocitySweep:
      report.result = orchestrator::run_velocity_sweep(config.velocity_sweep, *rig.drive,
                                                       *rig.bench, ctx);
      break;
    case Protocol::kThermal:
      report.result = orchestrator::run_thermal(thermal, *rig.drive, *rig.bench, ctx);
      break;
    case Protocol::kNoise:
      report.result = orchestrator::run_noise(config.noise, *rig.drive, *rig.bench, ctx);
      break;
    case Protocol::kBattery:
      report.result = orchestrator::run_battery(config.battery, *rig.drive, *rig.bench,
                                                config.plant.battery.usable_energy, ctx);
      break;
  }
  return report;
}

std::vector<TestReport> RunAndWrite(const std::vector<Protocol>& protocols,
                                    const ToolkitConfig& config, const RunOptions& options,
                                    const fs::path& out) {
  const std::string dumped = DumpConfig(config);
  const std::string hash = Sha256Hex(dumped);
  const fs::path manifest_path = out / "manifest.json";

  json manifest;
  if (fs::exists(manifest_path)) {
    manifest = ReadJson(manifest_path);
    const std::string previous = manifest.value("config_hash", "");
    if (previous != hash) {
      throw Error(ErrorCode::kConfig,
                  "output directory " + out.string() + " holds results for config " +
                      previous + ", current config is " + hash);
    }
  } else {
    manifest = {{"outputs", json::object()}};
  }
  manifest["toolkit_version"] = TDU_VERSION;
  manifest["config_hash"] = hash;
  manifest["config"] = "config.yaml";
  manifest["seed"] = options.seed;
  manifest["backend"] = std::string(hal::BackendKindName(options.backend));
  manifest["started_utc"] = UtcNow();
  WriteFile(out / "config.yaml", dumped);

  std::vector<TestReport> reports;
  for (Protocol p : protocols) {
    TestReport report = RunProtocol(p, config, options);
    json files = json::array();
    for (const auto& f : WriteReport(report, config, out)) files.push_back(f.generic_string());
    manifest["outputs"][std::string(ProtocolName(p))] = {
        {"report", std::string(ProtocolName(p)) + "/report.json"},
        {"files", files},
        {"seed", options.seed},
        {"backend", report.provenance.backend},
        {"finished_utc", UtcNow()}};
    reports.push_back(std::move(report));
  }
  manifest["finished_utc"] = UtcNow();
  WriteFile(manifest_path, manifest.dump(2) + "\n");
  return reports;
}

void VerifyManifest(const fs::path& out) {
  const json manifest = ReadJson(out / "manifest.json");
  const std::string hash = manifest.value("config_hash", "");
  const std::string actual = Sha256Hex(ReadFile(out / "config.yaml"));
  if (hash != actual) {
    throw Error(ErrorCode::kConfig, "config.yaml hash " + actual +
                                        " does not match manifest " + hash);
  }
  for (const auto& [name, entry] : manifest.at("outputs").items()) {
    for (const auto& f : entry.at("files")) {
      if (!fs::exists(out / f.get<std::string>())) {
        throw Error(ErrorCode::kConfig, "manifest lists missing output " + f.get<std::string>());
      }
    }
    const json report = ReadJson(out / entry.at("report").get<std::string>());
    if (report.value("config_hash", "") != hash) {
      throw Error(ErrorCode::kConfig, name + " report was produced under config " +
                                          report.value("config_hash", "") +
                                          ", manifest has " + hash);
    }
  }
}

}  // namespace tdu::report
