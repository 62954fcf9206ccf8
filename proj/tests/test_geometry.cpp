#include <socialzone/geometry.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace socialzone;

namespace {

Vec2 central_difference(const Vec2 & x, const Barrier & b, double h = 1e-6)
{
  return {(barrier_value(x + Vec2(h, 0), b) - barrier_value(x - Vec2(h, 0), b)) / (2 * h),
          (barrier_value(x + Vec2(0, h), b) - barrier_value(x - Vec2(0, h), b)) / (2 * h)};
}

const Segment kSeg(Vec2(0, 0), Vec2(2, 0));
const Ellipse kEll(Vec2(0, 0), 2.0, 1.0, 0.0);

}  // namespace

TEST(LineDistance, HandValue)
{
  EXPECT_DOUBLE_EQ(signed_line_distance(Vec2(1, 1), kSeg), -1.0);
  EXPECT_DOUBLE_EQ(signed_line_distance(Vec2(7.5, 0), kSeg), 0.0);
}

TEST(LineDistance, EndpointSwapNegates)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng)), x(u(rng), u(rng));
    EXPECT_NEAR(signed_line_distance(x, Segment(a, b)), -signed_line_distance(x, Segment(b, a)), 1e-12);
  }
}

TEST(Trim, HandValues)
{
  EXPECT_DOUBLE_EQ(trim(Vec2(1, 0), kSeg), 0.5);  // L / 4
  EXPECT_DOUBLE_EQ(trim(Vec2(2, 0), kSeg), 0.0);
  EXPECT_DOUBLE_EQ(trim(Vec2(3, 0), kSeg), -1.5);
}

TEST(SegmentDistance, HandValues)
{
  EXPECT_DOUBLE_EQ(segment_distance(Vec2(1, 1), kSeg), 1.0);
  EXPECT_DOUBLE_EQ(segment_distance(Vec2(3, 0), kSeg), 1.5);
  EXPECT_DOUBLE_EQ(oracle::exact_segment_distance(Vec2(3, 0), Vec2(0, 0), Vec2(2, 0)), 1.0);
  for (double s = 0.0; s <= 2.0; s += 0.25) EXPECT_NEAR(segment_distance(Vec2(s, 0), kSeg), 0.0, 1e-15);
}

TEST(SegmentDistance, ExactInsideTrimBandNeverUnder)
{
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng)), x(u(rng), u(rng));
    if ((b - a).norm() < 1e-3) continue;
    const Segment s(a, b);
    const double exact = oracle::exact_segment_distance(x, a, b);
    if (trim(x, s) >= 0.0) {
      EXPECT_NEAR(segment_distance(x, s), exact, 1e-12);
    }
    EXPECT_GE(segment_distance(x, s), exact - 1e-12);
  }
}

TEST(SegmentDistance, ZeroLengthRejected)
{
  EXPECT_THROW(Segment(Vec2(1, 1), Vec2(1, 1)), DegenerateInputError);
}

TEST(EllipseDistance, HandValues)
{
  EXPECT_NEAR(ellipse_distance(Vec2(2, 0), kEll), 0.0, 1e-15);
  EXPECT_NEAR(ellipse_distance(Vec2(0, 0), kEll), std::sqrt(3.0) - 2.0, 1e-15);
  EXPECT_NEAR(ellipse_distance(Vec2(4, 0), kEll), 2.0, 1e-15);
}

TEST(EllipseDistance, BoundaryResidualAndSign)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double b = 0.1 + u(rng), a = b * (1 + 3 * u(rng));
    const Ellipse e(Vec2(u(rng), -u(rng)), a, b, 6.0 * u(rng));
    const Vec2 p = e.boundary_point(6.3 * u(rng));
    EXPECT_NEAR(ellipse_distance(p, e), 0.0, 1e-12);
    EXPECT_NEAR(e.implicit_residual(p), 0.0, 1e-12);
    EXPECT_LT(ellipse_distance(e.center() + 0.9 * (p - e.center()), e), 0.0);
    EXPECT_GT(ellipse_distance(e.center() + 1.1 * (p - e.center()), e), 0.0);
  }
}

TEST(EllipseDistance, RejectsBadAxes)
{
  EXPECT_THROW(Ellipse(Vec2::Zero(), 1.0, 2.0, 0.0), DegenerateInputError);
  EXPECT_THROW(Ellipse(Vec2::Zero(), 1.0, 0.0, 0.0), DegenerateInputError);
}

TEST(Barrier, Values)
{
  const Barrier b(kEll, 0.5, 0.05);
  EXPECT_NEAR(barrier_value(Vec2(2, 0), b), -0.55, 1e-15);
  EXPECT_NEAR(barrier_value(Vec2(2.55, 0), b), 0.0, 1e-15);
  EXPECT_THROW(Barrier(kEll, -0.1, 0.0), ConfigError);
}

TEST(Barrier, GradientMatchesFiniteDifferences)
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const Barrier ell(Ellipse(Vec2(0.3, -0.2), 1.2, 0.7, 0.4), 0.5, 0.05);
  const Barrier seg(Segment(Vec2(-1, 0.5), Vec2(1.5, -0.5)), 0.5, 0.05);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x(u(rng), u(rng));
    for (const Barrier * b : {&ell, &seg}) {
      const Vec2 fd = central_difference(x, *b);
      EXPECT_LE((barrier_gradient(x, *b) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
    }
  }
}

TEST(Barrier, NearCircleGradientIsRadial)
{
  const Barrier b(Ellipse(Vec2(1, 1), 1.0 + 1e-12, 1.0, 0.3), 0.0, 0.0);
  for (const Vec2 & x : {Vec2(3, 1), Vec2(0, -0.5), Vec2(1.2, 2.9)}) {
    const Vec2 radial = (x - Vec2(1, 1)).normalized();
    EXPECT_LE((barrier_gradient(x, b) - radial).norm(), 1e-5);
  }
}

TEST(Barrier, MajorAxisGradient)
{
  const Barrier b(kEll, 0.5, 0.05);
  EXPECT_LE((barrier_gradient(Vec2(3, 0), b) - Vec2(1, 0)).norm(), 1e-12);
  EXPECT_LE((barrier_gradient(Vec2(-5, 0), b) - Vec2(-1, 0)).norm(), 1e-12);
}
