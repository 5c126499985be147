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

#include "tdu/orchestrator/table.h"

#include "tdu/common/error.h"

namespace tdu::orchestrator {

CellType TypeOf(const Cell& cell) { return static_cast<CellType>(cell.index()); }

void Table::Add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::kInsufficientData,
                "row has " + std::to_string(row.size()) + " cells, schema has " +
                    std::to_string(columns.size()));
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (TypeOf(row[i]) != columns[i].type) {
      throw Error(ErrorCode::kInsufficientData,
                  "cell type mismatch in column '" + columns[i].name + "'");
    }
  }
  rows.push_back(std::move(row));
}

std::size_t Table::Find(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  throw Error(ErrorCode::kInsufficientData, "no column '" + name + "'");
}

std::vector<double> Table::Reals(const std::string& name) const {
  const std::size_t c = Find(name);
  if (columns[c].type != CellType::kReal) {
    throw Error(ErrorCode::kInsufficientData, "column '" + name + "' is not real");
  }
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(std::get<double>(row[c]));
  return out;
}

}  // namespace tdu::orchestrator
