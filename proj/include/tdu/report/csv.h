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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tdu/orchestrator/table.h"

namespace tdu::report {

/// RFC 4180 text: header row, "\n" line endings, reals with nine
/// significant digits, booleans as true/false. Fields are quoted only when
/// they contain a comma, quote or newline.
std::string FormatCsv(const orchestrator::Table& table);

/// Parses text produced by FormatCsv. The header must match `schema`
/// exactly; throws kIo naming the line on any mismatch.
orchestrator::Table ParseCsv(std::string_view text,
                             const std::vector<orchestrator::Column>& schema);

/// Formats a real the way the CSV writer does.
std::string FormatReal(double v);

void WriteCsv(const orchestrator::Table& table, const std::filesystem::path& path);
orchestrator::Table ReadCsv(const std::filesystem::path& path,
                            const std::vector<orchestrator::Column>& schema);

/// Writes `bytes` to `path`, creating parent directories.
void WriteFile(const std::filesystem::path& path, std::string_view bytes);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace tdu::report
