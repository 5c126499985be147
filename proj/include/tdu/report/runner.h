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
#include <functional>
#include <stop_token>
#include <string>
#include <vector>

#include "tdu/hal/drive.h"
#include "tdu/report/config.h"
#include "tdu/report/report.h"

namespace tdu::report {

struct RunOptions {
  hal::BackendKind backend = hal::BackendKind::kSim;
  std::uint64_t seed = 0;
  bool accelerate = true;
  std::stop_token stop;
  std::function<void(const std::string&)> progress;
};

/// Runs one protocol on a freshly constructed backend seeded with
/// `options.seed`.
TestReport RunProtocol(Protocol protocol, const ToolkitConfig& config,
                       const RunOptions& options);

/// Runs each protocol in turn and writes its report under `out`, plus
/// <out>/config.yaml and <out>/manifest.json. An existing manifest in `out`
/// recorded under a different config hash is a kConfig error.
std::vector<TestReport> RunAndWrite(const std::vector<Protocol>& protocols,
                                    const ToolkitConfig& config, const RunOptions& options,
                                    const std::filesystem::path& out);

/// Checks that config.yaml, the manifest and every listed report agree on
/// the config hash and that every listed output exists. Throws kConfig on
/// the first disagreement.
void VerifyManifest(const std::filesystem::path& out);

}  // namespace tdu::report
