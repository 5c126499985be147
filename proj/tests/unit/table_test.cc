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


#include <gtest/gtest.h>

#include "tdu/common/error.h"
#include "tdu/orchestrator/table.h"

namespace tdu::orchestrator {
namespace {

Table Sample() {
  return Table{{{"name", CellType::kText},
                {"value", CellType::kReal},
                {"count", CellType::kInteger},
                {"ok", CellType::kBool}},
               {}};
}

TEST(Table, AddChecksArityAndTypes) {
  Table t = Sample();
  t.Add({std::string("a"), 1.5, std::int64_t{3}, true});
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_THROW(t.Add({std::string("a"), 1.5, std::int64_t{3}}), Error);
  EXPECT_THROW(t.Add({std::string("a"), std::int64_t{1}, std::int64_t{3}, true}), Error);
  EXPECT_EQ(t.rows.size(), 1u);
}

TEST(Table, FindAndReals) {
  Table t = Sample();
  t.Add({std::string("a"), 1.5, std::int64_t{3}, true});
  t.Add({std::string("b"), -2.0, std::int64_t{4}, false});
  EXPECT_EQ(t.Find("count"), 2u);
  EXPECT_EQ(t.Reals("value"), (std::vector<double>{1.5, -2.0}));
  EXPECT_THROW(t.Find("missing"), Error);
  EXPECT_THROW(t.Reals("name"), Error);
}

TEST(Table, TypeOfMatchesVariantIndex) {
  EXPECT_EQ(TypeOf(Cell{std::string("x")}), CellType::kText);
  EXPECT_EQ(TypeOf(Cell{1.0}), CellType::kReal);
  EXPECT_EQ(TypeOf(Cell{std::int64_t{1}}), CellType::kInteger);
  EXPECT_EQ(TypeOf(Cell{false}), CellType::kBool);
}

}  // namespace
}  // namespace tdu::orchestrator
