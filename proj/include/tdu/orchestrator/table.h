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
#include <string>
#include <variant>
#include <vector>

namespace tdu::orchestrator {

enum class CellType : std::uint8_t { kText, kReal, kInteger, kBool };

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Column {
  std::string name;
  CellType type = CellType::kReal;

  bool operator==(const Column&) const = default;
};

/// Rectangular result table with a fixed column schema.
struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  /// Appends a row; throws kInsufficientData if the arity or any cell type
  /// disagrees with the schema.
  void Add(std::vector<Cell> row);

  std::size_t Find(const std::string& name) const;
  /// All values of a kReal column.
  std::vector<double> Reals(const std::string& name) const;

  bool operator==(const Table&) const = default;
};

CellType TypeOf(const Cell& cell);

}  // namespace tdu::orchestrator
