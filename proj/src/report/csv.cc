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

#include "tdu/report/csv.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tdu/common/error.h"

namespace tdu::report {
namespace {

using orchestrator::Cell;
using orchestrator::CellType;
using orchestrator::Column;
using orchestrator::Table;

void AppendField(std::string& out, const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::string FormatCell(const Cell& cell) {
  switch (orchestrator::TypeOf(cell)) {
    case CellType::kText: return std::get<std::string>(cell);
    case CellType::kReal: return FormatReal(std::get<double>(cell));
    case CellType::kInteger: return std::to_string(std::get<std::int64_t>(cell));
    case CellType::kBool: return std::get<bool>(cell) ? "true" : "false";
  }
  return {};
}

[[noreturn]] void Fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kIo, "csv line " + std::to_string(line) + ": " + what);
}

// Splits one record starting at `pos`; advances `pos` past its line end.
std::vector<std::string> ReadRecord(std::string_view text, std::size_t& pos,
                                    std::size_t line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          fields.back() += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      return fields;
    } else {
      fields.back() += c;
    }
    ++pos;
  }
  if (quoted) Fail(line, "unterminated quoted field");
  return fields;
}

Cell ParseCell(const std::string& s, const Column& col, std::size_t line) {
  switch (col.type) {
    case CellType::kText:
      return s;
    case CellType::kReal: {
      if (s.empty()) Fail(line, "empty value in '" + col.name + "'");
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(s.c_str(), &end);
      if (end != s.c_str() + s.size()) Fail(line, "bad real '" + s + "' in '" + col.name + "'");
      return v;
    }
    case CellType::kInteger: {
      char* end = nullptr;
      const long long v = std::strtoll(s.c_str(), &end, 10);
      if (s.empty() || end != s.c_str() + s.size()) {
        Fail(line, "bad integer '" + s + "' in '" + col.name + "'");
      }
      return static_cast<std::int64_t>(v);
    }
    case CellType::kBool:
      if (s == "true") return true;
      if (s == "false") return false;
      Fail(line, "bad boolean '" + s + "' in '" + col.name + "'");
  }
  Fail(line, "unknown column type");
}

}  // namespace

std::string FormatReal(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string FormatCsv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    AppendField(out, table.columns[i].name);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      AppendField(out, FormatCell(row[i]));
    }
    out += '\n';
  }
  return out;
}

Table ParseCsv(std::string_view text, const std::vector<Column>& schema) {
  std::size_t pos = 0;
  std::size_t line = 1;
  const auto header = ReadRecord(text, pos, line);
  if (header.size() != schema.size()) Fail(line, "header has wrong column count");
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (header[i] != schema[i].name) {
      Fail(line, "expected column '" + schema[i].name + "', found '" + header[i] + "'");
    }
  }
  Table table{schema, {}};
  while (pos < text.size()) {
    ++line;
    const auto fields = ReadRecord(text, pos, line);
    if (fields.size() != schema.size()) {
      Fail(line, "expected " + std::to_string(schema.size()) + " fields, found " +
                     std::to_string(fields.size()));
    }
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row.push_back(ParseCell(fields[i], schema[i], line));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void WriteFile(const std::filesystem::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void WriteCsv(const Table& table, const std::filesystem::path& path) {
  WriteFile(path, FormatCsv(table));
}

Table ReadCsv(const std::filesystem::path& path, const std::vector<Column>& schema) {
  return ParseCsv(ReadFile(path), schema);
}

}  // namespace tdu::report
