#include <socialzone/zonelearn.hpp>

#include "synthetic.hpp"

#include <gtest/gtest.h>

using namespace socialzone;

TEST(Complement, Examples)
{
  const std::vector<InteractionRecord> recs{{0.0, 2.0, 1.0}, {0.0, 0.5, 1.0}, {kPi / 2, 1.0, 1.0}};
  const auto c = to_complement(recs, 2.0);
  EXPECT_NEAR(c[0].x(), 0.0, 1e-15);
  EXPECT_NEAR(c[0].y(), 0.0, 1e-15);
  EXPECT_NEAR(c[1].x(), 1.5, 1e-15);
  EXPECT_NEAR(c[1].y(), 0.0, 1e-15);
  EXPECT_NEAR(c[2].x(), 0.0, 1e-15);
  EXPECT_NEAR(c[2].y(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(c[2].z(), 1.0);
}

TEST(Complement, InvolutionOnDistances)
{
  for (double r = 0.0; r <= 2.0; r += 0.125) {
    const std::vector<InteractionRecord> one{{0.3, r, 1.0}};
    const Vec3 c = to_complement(one, 2.0)[0];
    EXPECT_NEAR(2.0 - Vec2(c.x(), c.y()).norm(), r, 1e-12);
  }
}

TEST(BuildZoneModel, EmptyGivesNoZonesAndWarning)
{
  const auto res = build_zone_model(std::vector<InteractionRecord>{});
  EXPECT_TRUE(res.model.empty());
  EXPECT_FALSE(res.warnings.empty());
}

TEST(BuildZoneModel, CircleGenerator)
{
  const auto res = build_zone_model(synth::records(20000, synth::circle_06, 17));
  ASSERT_EQ(res.model.zones.size(), 7u);
  for (const auto & z : res.model.zones) {
    EXPECT_NEAR(z.a, 0.6, 0.02);
    EXPECT_NEAR(z.b, 0.6, 0.02);
    EXPECT_LT(z.center.norm(), 0.02);
  }
}

TEST(BuildZoneModel, FrontHeavyGeneratorShiftsForward)
{
  const auto res = build_zone_model(synth::records(20000, synth::front_heavy, 18));
  ASSERT_FALSE(res.model.empty());
  for (const auto & z : res.model.zones) EXPECT_GT(z.center.x(), 0.0);
}

TEST(BuildZoneModel, UncoveredSpeedIsWarnedNotFatal)
{
  ZoneLearnParams p;
  p.speeds = {0.8, 1.0, 2.5};
  const auto res = build_zone_model(synth::records(5000, synth::circle_06, 19, 0.0, 0.35, 0.5, 1.5), p);
  EXPECT_EQ(res.model.zones.size(), 2u);
  ASSERT_EQ(res.warnings.size(), 1u);
  EXPECT_NE(res.warnings[0].find("2.5"), std::string::npos);
}

TEST(BuildZoneModel, IsolatedIntrusionsAreRemoved)
{
  const auto res = build_zone_model(synth::records(20000, synth::circle_06, 20, 0.0005));
  for (const auto & z : res.model.zones) EXPECT_NEAR(z.b, 0.6, 0.02);
}
