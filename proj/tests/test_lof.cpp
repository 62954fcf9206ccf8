#include <socialzone/kdtree.hpp>
#include <socialzone/lof.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace socialzone;

TEST(KdTree, NearestMatchesBruteForce)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 500; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  const KdTree<3> tree(pts);
  for (int q = 0; q < 50; ++q) {
    const Vec3 x(u(rng), u(rng), u(rng));
    std::vector<double> d;
    for (const auto & p : pts) d.push_back((p - x).squaredNorm());
    std::sort(d.begin(), d.end());
    const auto knn = tree.nearest(x, 7, static_cast<std::size_t>(-1));
    ASSERT_EQ(knn.size(), 7u);
    EXPECT_DOUBLE_EQ(knn.back().first, d[6]);
  }
}

TEST(Lof, GridInteriorNearOne)
{
  std::vector<Vec2> pts;
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 15; ++j) pts.emplace_back(i, j);
  }
  const auto s = lof_scores<2>(std::span<const Vec2>(pts), 4);
  const auto ref = oracle::brute_force_lof(pts, 4);
  EXPECT_NEAR(s[7 * 15 + 7], 1.0, 0.2);
  EXPECT_NEAR(s[7 * 15 + 7], ref[7 * 15 + 7], 1e-12);
}

TEST(Lof, IsolatedPointDominates)
{
  const std::vector<Vec2> pts{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {10, 10}};
  const auto s = lof_scores<2>(std::span<const Vec2>(pts), 2);
  const auto ref = oracle::brute_force_lof(pts, 2);
  for (int i = 0; i < 4; ++i) EXPECT_GT(s[4], 5.0 * s[static_cast<std::size_t>(i)]);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(s[i], ref[i], 1e-12 * ref[i]);
}

TEST(Lof, IdenticalPointsScoreOne)
{
  const std::vector<Vec2> pts(10, Vec2(2.0, -1.0));
  for (const double v : lof_scores<2>(std::span<const Vec2>(pts), 3)) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Lof, RejectsBadK)
{
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_THROW(lof_scores<2>(std::span<const Vec2>(pts), 3), ConfigError);
  EXPECT_THROW(lof_scores<2>(std::span<const Vec2>(pts), 0), ConfigError);
}

TEST(RemoveOutliers, FractionZeroKeepsAll)
{
  std::vector<Vec2> pts;
  for (int i = 0; i < 30; ++i) pts.emplace_back(i % 5, i / 5);
  const auto split = remove_outliers<2>(std::span<const Vec2>(pts), 0.0, 5);
  EXPECT_EQ(split.inliers.size(), 30u);
  EXPECT_TRUE(split.outliers.empty());
}

TEST(RemoveOutliers, CeilingCountAndPlantedPair)
{
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 998; ++i) pts.emplace_back(g(rng), g(rng), g(rng));
  pts.emplace_back(40.0, 0.0, 0.0);
  pts.emplace_back(0.0, -40.0, 10.0);
  const auto split = remove_outliers<3>(std::span<const Vec3>(pts), 0.002, 20);
  ASSERT_EQ(split.outliers.size(), 2u);
  EXPECT_EQ(split.outliers[0], 998u);
  EXPECT_EQ(split.outliers[1], 999u);
}

TEST(RemoveOutliers, RejectsBadFraction)
{
  const std::vector<Vec2> pts{{0, 0}, {1, 0}};
  EXPECT_THROW(remove_outliers<2>(std::span<const Vec2>(pts), 1.0, 1), ConfigError);
}
