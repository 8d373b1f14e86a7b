// Copyright 2026 The graphscore Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "graphscore/labels.h"

#include <gtest/gtest.h>

#include "test_support.h"

namespace graphscore {
namespace {

using testing::TempDir;
using testing::write_text;

LabelTable history(const std::string& entity, Period entered, const std::vector<double>& dpd) {
  LabelTable t;
  for (std::size_t k = 0; k < dpd.size(); ++k)
    t.add({entity, entered + static_cast<Period>(k), dpd[k], entered});
  return t;
}

TEST(LabelTable, AddAndFind) {
  LabelTable t = history("P1", 3, {0, 30, 0});
  t.add({"P2", 1, 0, -4});
  EXPECT_EQ(t.size(), 4u);
  ASSERT_NE(t.find("P1", 4), nullptr);
  EXPECT_EQ(t.find("P1", 4)->days_past_due_max, 30);
  EXPECT_EQ(t.find("P1", 6), nullptr);
  EXPECT_EQ(t.entered_period("P2"), -4);
  EXPECT_FALSE(t.entered_period("P3"));
  EXPECT_EQ(t.first_period(), 1);
  EXPECT_EQ(t.last_period(), 5);
  EXPECT_EQ(t.entities(), (std::vector<std::string>{"P1", "P2"}));
}

TEST(LabelTable, RejectsInconsistentRows) {
  LabelTable t = history("P1", 1, {0});
  EXPECT_THROW(t.add({"P1", 1, 0, 1}), ConfigError);
  EXPECT_THROW(t.add({"P1", 2, 0, 2}), ConfigError);
  EXPECT_THROW(t.add({"P2", 2, -1, 2}), ConfigError);
}

TEST(DefaultTarget, DefaultInsideWindow) {
  const LabelTable t = history("P1", 1, {0, 0, 30, 60, 90, 90});
  const TargetSpec spec{3, 90};
  EXPECT_EQ(default_target(t, "P1", 2, spec), 1);
  EXPECT_EQ(default_target(t, "P1", 1, spec), 0);  // 90 first reached at period 5
  EXPECT_EQ(default_target(t, "P1", 4, spec), 1);  // window runs past the data
  EXPECT_EQ(default_target(t, "P1", 3, spec), 1);
}

TEST(DefaultTarget, CleanWindowIsZero) {
  const LabelTable t = history("P1", 1, {0, 30, 60, 0, 0});
  EXPECT_EQ(default_target(t, "P1", 1, TargetSpec{4, 90}), 0);
}

TEST(DefaultTarget, IncompleteWindowIsDropped) {
  const LabelTable t = history("P1", 1, {0, 0, 0});
  EXPECT_EQ(default_target(t, "P1", 1, TargetSpec{3, 90}), std::nullopt);
  EXPECT_EQ(default_target(t, "P9", 1, TargetSpec{1, 90}), std::nullopt);
}

TEST(DefaultTarget, DefaultBeforeGapCounts) {
  LabelTable t;
  t.add({"P1", 1, 0, 1});
  t.add({"P1", 2, 90, 1});
  EXPECT_EQ(default_target(t, "P1", 1, TargetSpec{12, 90}), 1);
}

TEST(LabelIo, RoundTrip) {
  TempDir dir;
  LabelTable t = history("P1", 2, {0, 30, 60});
  t.add({"C1", 1, 0, 0});
  write_labels(t, dir.file("labels.csv"));
  const LabelTable back = load_labels(dir.file("labels.csv"));
  ASSERT_EQ(back.size(), t.size());
  for (const auto& r : t.rows()) {
    const LabelRecord* b = back.find(r.entity, r.period);
    ASSERT_NE(b, nullptr);
    EXPECT_EQ(b->days_past_due_max, r.days_past_due_max);
    EXPECT_EQ(b->entered_period, r.entered_period);
  }
}

TEST(LabelIo, MalformedRowReportsLine) {
  TempDir dir;
  write_text(dir.file("l.csv"),
             "entity,period,days_past_due_max,entered_period\nP1,1,0,1\nP1,x,0,1\n");
  try {
    load_labels(dir.file("l.csv"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(EntityKinds, RoundTripAndValidation) {
  TempDir dir;
  write_entity_kinds({{"P1", EntityKind::Person}, {"C1", EntityKind::Business}},
                     dir.file("e.csv"));
  const EntityKinds k = load_entity_kinds(dir.file("e.csv"));
  EXPECT_EQ(k.at("P1"), EntityKind::Person);
  EXPECT_EQ(k.at("C1"), EntityKind::Business);
  write_text(dir.file("bad.csv"), "entity,kind\nP1,Robot\n");
  EXPECT_THROW(load_entity_kinds(dir.file("bad.csv")), ParseError);
}

}  // namespace
}  // namespace graphscore
