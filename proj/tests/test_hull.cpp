#include <socialzone/convex_hull.hpp>
#include <socialzone/enclosing_ellipse.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace socialzone;

namespace {

long euler_characteristic(const ConvexHull3 & h)
{
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto & t : h.faces) {
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
  }
  return static_cast<long>(h.vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(h.faces.size());
}

// Smallest-area ellipse among a grid of (center, axes, angle) candidates around
// the centroid that contain every point; a coarse independent check on the optimizer.
double grid_search_min_area(const std::vector<Vec2> & pts, double c_range, double axis_max)
{
  Vec2 mid = Vec2::Zero();
  for (const auto & p : pts) mid += p;
  mid /= static_cast<double>(pts.size());
  double best = 1e300;
  for (int i = -5; i <= 5; ++i) {
    for (int j = -5; j <= 5; ++j) {
      const Vec2 c = mid + Vec2(i, j) * (c_range / 5);
      for (double a = 0.05; a <= axis_max; a += 0.025) {
        for (double b = 0.05; b <= a; b += 0.025) {
          for (int ti = 0; ti < 24; ++ti) {
            const Ellipse e(c, a, b, kPi * ti / 24);
            if (std::all_of(pts.begin(), pts.end(), [&](const Vec2 & p) { return e.implicit_residual(p) <= 1e-9; })) {
              best = std::min(best, e.area());
            }
          }
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST(Hull, CubeCornersOnly)
{
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 100; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  const auto h = convex_hull_3d(pts);
  EXPECT_EQ(h.vertices.size(), 8u);
  for (const auto idx : h.source_index) EXPECT_LT(idx, 8u);
  EXPECT_EQ(euler_characteristic(h), 2);
}

TEST(Hull, OctahedronCounts)
{
  const std::vector<Vec3> pts{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  const auto h = convex_hull_3d(pts);
  EXPECT_EQ(h.vertices.size(), 6u);
  EXPECT_EQ(h.faces.size(), 8u);
  EXPECT_EQ(euler_characteristic(h), 2);
}

TEST(Hull, RandomCloudInside)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 2000; ++i) pts.emplace_back(g(rng), g(rng), g(rng));
  const auto h = convex_hull_3d(pts);
  for (const auto & p : pts) {
    for (std::size_t f = 0; f < h.faces.size(); ++f) EXPECT_LE(h.signed_distance(f, p), 1e-9);
  }
  EXPECT_EQ(euler_characteristic(h), 2);
}

TEST(Hull, DegenerateInputThrows)
{
  const std::vector<Vec3> flat{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 0}};
  EXPECT_THROW(convex_hull_3d(flat), DegenerateInputError);
}

TEST(Slice, UnitCubeMiddle)
{
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  const auto poly = slice_at_speed(convex_hull_3d(pts), 0.5);
  ASSERT_EQ(poly.size(), 4u);
  EXPECT_NEAR(polygon_area(poly), 1.0, 1e-12);
}

TEST(Slice, TetrahedronApexAreaScalesQuadratically)
{
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const auto h = convex_hull_3d(pts);
  for (const double z : {0.5, 0.9, 0.99}) {
    // similar triangles: legs (1 - z), area (1 - z)^2 / 2
    EXPECT_NEAR(polygon_area(slice_at_speed(h, z)), 0.5 * (1 - z) * (1 - z), 1e-12);
  }
}

TEST(Slice, AreaBoundedByProjection)
{
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 300; ++i) pts.emplace_back(g(rng), g(rng), g(rng));
  const auto h = convex_hull_3d(pts);
  std::vector<Vec2> proj;
  for (const auto & p : pts) proj.emplace_back(p.x(), p.y());
  const double bound = polygon_area(convex_hull_2d(proj));
  for (const double z : {-1.0, -0.3, 0.0, 0.4, 1.2}) EXPECT_LE(polygon_area(slice_at_speed(h, z)), bound + 1e-12);
}

TEST(Slice, OutsideRangeThrows)
{
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  EXPECT_THROW(slice_at_speed(convex_hull_3d(pts), 1.5), EmptySliceError);
  EXPECT_THROW(slice_at_speed(convex_hull_3d(pts), 0.0), EmptySliceError);
}

TEST(EnclosingEllipse, SquareGivesCircle)
{
  const std::vector<Vec2> sq{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  const auto e = min_enclosing_ellipse(sq);
  EXPECT_NEAR(e.a(), std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(e.b(), std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(e.center().norm(), 0.0, 1e-9);
  EXPECT_LE(e.area(), grid_search_min_area(sq, 0.2, 1.6) + 1e-9);
}

TEST(EnclosingEllipse, RecoversKnownEllipse)
{
  const Ellipse truth(Vec2(0.0, 0.0), 2.0, 1.0, 0.3);
  std::vector<Vec2> pts;
  for (int i = 0; i < 500; ++i) pts.push_back(truth.boundary_point(2 * kPi * i / 500));
  const auto e = min_enclosing_ellipse(pts);
  EXPECT_NEAR(e.a(), 2.0, 0.02);
  EXPECT_NEAR(e.b(), 1.0, 0.01);
  EXPECT_NEAR(std::remainder(e.theta() - 0.3, kPi), 0.0, 0.003);
}

TEST(EnclosingEllipse, TriangleTouchesAllVertices)
{
  const std::vector<Vec2> tri{{0, 0}, {1, 0}, {0.3, 0.8}};
  const auto e = min_enclosing_ellipse(tri);
  for (const auto & p : tri) EXPECT_NEAR(e.implicit_residual(p), 0.0, 1e-7);
  EXPECT_LE(e.area(), grid_search_min_area(tri, 0.2, 1.0) + 1e-9);
}

TEST(EnclosingEllipse, CollinearThrows)
{
  const std::vector<Vec2> line{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_THROW(min_enclosing_ellipse(line), DegenerateInputError);
}
