// Copyright 2026 The LooseIMU Authors
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

#include "looseimu/motion_gen.h"

#include <gtest/gtest.h>

#include <set>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

TEST(MotionGenTest, DeterministicInSeed) {
  const GeneratedMotion a = GenerateMotion(300, 7);
  const GeneratedMotion b = GenerateMotion(300, 7);
  const GeneratedMotion c = GenerateMotion(300, 8);
  ASSERT_EQ(a.pose.frames(), 300);
  ASSERT_EQ(a.activity.size(), 300u);
  bool differs = false;
  for (int f = 0; f < 300; ++f) {
    for (int j = 0; j < kJointCount; ++j) {
      EXPECT_EQ(a.pose.rotation(f, j).quat().coeffs(), b.pose.rotation(f, j).quat().coeffs());
      differs |= AngularOffsetDeg(a.pose.rotation(f, j), c.pose.rotation(f, j)) > 1e-3;
    }
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.activity, b.activity);
}

TEST(MotionGenTest, TenMinutesCoverEveryActivity) {
  const GeneratedMotion m = GenerateMotion(10 * 60 * 30, 1);
  std::set<Activity> seen(m.activity.begin(), m.activity.end());
  EXPECT_EQ(static_cast<int>(seen.size()), kActivityCount);
}

TEST(MotionGenTest, MotionIsSmoothAndPlausible) {
  const GeneratedMotion m = GenerateMotion(3000, 3);
  for (int f = 0; f < m.pose.frames(); ++f) {
    const double h = m.pose.root_translation(f).z();
    EXPECT_GT(h, 0.3);
    EXPECT_LT(h, 1.1);
    if (f == 0) continue;
    EXPECT_LT((m.pose.root_translation(f) - m.pose.root_translation(f - 1)).norm(), 0.1);
    for (int j = 0; j < kJointCount; ++j) {
      // Under 10 degrees per frame at 30 fps.
      EXPECT_LT(AngularOffsetDeg(m.pose.rotation(f, j), m.pose.rotation(f - 1, j)), 10.0)
          << "frame " << f << " joint " << j;
    }
  }
}

TEST(MotionGenTest, RejectsEmptyRequest) {
  EXPECT_THROW(GenerateMotion(0, 1), SequenceLengthError);
  EXPECT_EQ(ToString(Activity::kSquat), "squat");
}

}  // namespace
}  // namespace looseimu
