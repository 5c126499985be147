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

// Command-line front end for the TDU benchmark protocols.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tdu/report/calibrate.h"
#include "tdu/report/config.h"
#include "tdu/report/csv.h"
#include "tdu/report/report.h"
#include "tdu/report/runner.h"

namespace {

using namespace tdu;
using namespace tdu::report;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitProtocol = 4;
constexpr int kExitBackend = 5;

volatile std::sig_atomic_t g_interrupted = 0;

void OnSignal(int) { g_interrupted = 1; }

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return kExitConfig;
    case ErrorCode::kOutOfRange:
    case ErrorCode::kUnknownMotor:
    case ErrorCode::kDriveFault:
    case ErrorCode::kBackendTimeout:
    case ErrorCode::kPlantFault:
      return kExitBackend;
    default:
      return kExitProtocol;
  }
}

std::optional<std::uint64_t> ParseSeed(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 0);
  if (errno != 0 || end != text.c_str() + text.size() || text[0] == '-') {
    return std::nullopt;
  }
  return v;
}

struct Options {
  std::string config_path;
  std::string backend = "sim";
  std::string seed_text;
  std::string out = "results";
  bool accelerate = false;
  bool quiet = false;
  std::vector<std::string> free_params;
  bool free_params_set = false;
};

ToolkitConfig LoadSelectedConfig(const Options& o) {
  return o.config_path.empty() ? LoadConfig("") : LoadConfigFile(o.config_path);
}

std::uint64_t ResolveSeed(const Options& o) {
  std::string text = o.seed_text;
  if (text.empty()) {
    if (const char* env = std::getenv("TDUBENCH_SEED")) text = env;
  }
  if (text.empty()) return 0;
  const auto seed = ParseSeed(text);
  if (!seed) throw Error(ErrorCode::kConfig, "seed '" + text + "' is not an unsigned integer");
  return *seed;
}

void PrintSummary(const TestReport& r) {
  std::visit(
      [&](const auto& res) {
        using T = std::decay_t<decltype(res)>;
        if constexpr (std::is_same_v<T, orchestrator::StaticTorqueResult>) {
          for (const auto& f : res.fits) {
            std::cout << "motor " << static_cast<int>(f.motor) << ": measured = "
                      << f.fit.slope << " * commanded + " << f.fit.intercept
                      << " (R^2 " << f.fit.r_squared << ")\n";
          }
        } else if constexpr (std::is_same_v<T, orchestrator::VelocitySweepResult>) {
          std::cout << res.points.size() << " Bode points\n";
        } else if constexpr (std::is_same_v<T, orchestrator::ThermalResult>) {
          for (const auto& p : res.phases) {
            std::cout << (p.fans_on ? "fans on " : "fans off") << ": rise "
                      << (p.rise ? FormatReal(*p.rise) : "n/a") << " s, fall "
                      << (p.fall ? FormatReal(*p.fall) : "n/a") << " s, fall to secondary "
                      << (p.fall_secondary ? FormatReal(*p.fall_secondary) : "n/a")
                      << " s\n";
          }
        } else if constexpr (std::is_same_v<T, orchestrator::NoiseResult>) {
          for (const auto& m : res.measurements) {
            std::cout << orchestrator::NoiseConditionName(m.condition) << " " << m.speed
                      << " rad/s: " << FormatReal(m.level_db) << " dB\n";
          }
        } else {
          for (const auto& c : res.conditions) {
            std::cout << c.load << " kg: " << FormatHms(c.runtime) << ", torque "
                      << c.torque.mean << " +/- " << c.torque.sd << " N*m\n";
          }
        }
      },
      r.result);
}

int RunProtocols(const std::vector<Protocol>& protocols, const Options& o,
                 std::stop_token stop) {
  const ToolkitConfig config = LoadSelectedConfig(o);
  RunOptions run;
  run.backend = hal::ParseBackendKind(o.backend);
  run.seed = ResolveSeed(o);
  run.accelerate = o.accelerate;
  run.stop = stop;
  if (!o.quiet) run.progress = [](const std::string& m) { std::cerr << m << "\n"; };
  const auto reports = RunAndWrite(protocols, config, run, o.out);
  for (const auto& r : reports) {
    std::cout << "[" << ProtocolName(r.protocol) << "]\n";
    PrintSummary(r);
  }
  std::cout << "wrote " << o.out << "/manifest.json\n";
  return kExitOk;
}

int RunCalibrate(const Options& o) {
  ToolkitConfig config = LoadSelectedConfig(o);
  const auto& free = o.free_params_set ? o.free_params : config.calibration.free_params;
  const CalibrationResult result = Calibrate(config, free);

  orchestrator::Table residuals{{{"target", orchestrator::CellType::kText},
                                 {"target_value", orchestrator::CellType::kReal},
                                 {"model_value", orchestrator::CellType::kReal},
                                 {"relative_error", orchestrator::CellType::kReal}},
                                {}};
  for (const auto& r : result.residuals) {
    residuals.Add({r.target, r.target_value, r.model_value, r.relative_error});
  }
  std::cout << "fitted parameters:\n";
  if (result.fitted.empty()) std::cout << "  (none)\n";
  for (const auto& [name, value] : result.fitted) {
    std::cout << "  " << name << " = " << FormatReal(value) << "\n";
  }
  std::cout << "residuals:\n" << FormatCsv(residuals);

  config.plant = result.params;
  const std::filesystem::path dir = std::filesystem::path(o.out) / "calibration";
  WriteFile(dir / "calibrated.yaml", DumpConfig(config));
  WriteCsv(residuals, dir / "residuals.csv");
  std::cout << "wrote " << (dir / "calibrated.yaml").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark protocols for two-motor tendon driver units"};
  app.require_subcommand(1);
  Options o;

  app.add_option("--config", o.config_path, "YAML configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--backend", o.backend, "Drive backend")
      ->check(CLI::IsMember({"sim", "frame"}));
  app.add_option("--seed", o.seed_text, "Noise seed (default $TDUBENCH_SEED or 0)");
  app.add_option("--out", o.out, "Output directory");
  app.add_flag("--accelerate", o.accelerate, "Run simulated time as fast as possible");
  app.add_flag("-q,--quiet", o.quiet, "Suppress progress messages");

  std::vector<std::pair<CLI::App*, Protocol>> protocol_cmds;
  for (Protocol p : kAllProtocols) {
    std::string name(ProtocolName(p));
    for (char& c : name) {
      if (c == '_') c = '-';
    }
    protocol_cmds.emplace_back(app.add_subcommand(name, "Run the " + name + " protocol"), p);
  }
  CLI::App* all = app.add_subcommand("all", "Run every protocol");
  CLI::App* calibrate = app.add_subcommand("calibrate", "Fit plant parameters to targets");
  calibrate->add_option("--free", o.free_params, "Free parameters (default from config)")
      ->each([&](const std::string&) { o.free_params_set = true; });
  calibrate->add_flag_callback("--none", [&] { o.free_params_set = true; },
                               "Fit nothing; report residuals only");
  CLI::App* dump = app.add_subcommand("dump-config", "Print the effective configuration");
  CLI::App* verify = app.add_subcommand("verify", "Check an output directory's manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  std::stop_source stop;
  std::jthread watcher([&stop](std::stop_token self) {
    while (!self.stop_requested()) {
      if (g_interrupted) {
        stop.request_stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });

  try {
    if (dump->parsed()) {
      std::cout << DumpConfig(LoadSelectedConfig(o));
      return kExitOk;
    }
    if (verify->parsed()) {
      VerifyManifest(o.out);
      std::cout << "manifest ok\n";
      return kExitOk;
    }
    if (calibrate->parsed()) return RunCalibrate(o);
    if (all->parsed()) {
      return RunProtocols({std::begin(kAllProtocols), std::end(kAllProtocols)}, o,
                          stop.get_token());
    }
    for (const auto& [cmd, p] : protocol_cmds) {
      if (cmd->parsed()) return RunProtocols({p}, o, stop.get_token());
    }
  } catch (const NotReachedError& e) {
    std::cerr << "tdubench: " << e.what() << " (last value " << e.last_value() << ")\n";
    return ExitCodeFor(e.code());
  } catch (const Error& e) {
    std::cerr << "tdubench: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "tdubench: " << e.what() << "\n";
    return kExitProtocol;
  }
  return kExitUsage;
}
