#ifndef SOCIALZONE_CONVEX_HULL_HPP
#define SOCIALZONE_CONVEX_HULL_HPP

/**
 * @file
 * @brief 3D QuickHull, 2D monotone-chain hull and horizontal slicing of a 3D hull.
 *
 * The 3D hull is built incrementally: every face keeps the set of points in front
 * of it, the farthest such point is added next, the faces it sees are removed and
 * the horizon is coned to it. A point counts as "in front" when its signed
 * distance exceeds 1e-12 times the bounding-box diagonal.
 */

#include "core.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <span>
#include <unordered_map>
#include <vector>

namespace socialzone {

/// Triangulated convex polytope with outward-oriented (counterclockwise seen from outside) faces.
struct ConvexHull3
{
  std::vector<Vec3> vertices;
  std::vector<std::size_t> source_index;  ///< vertices[i] == input[source_index[i]]
  std::vector<std::array<std::size_t, 3>> faces;

  Vec3 face_normal(std::size_t f) const
  {
    const auto & t = faces[f];
    return (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).normalized();
  }

  /// Signed distance of @p p to the plane of face @p f, positive outside.
  double signed_distance(std::size_t f, const Vec3 & p) const
  {
    return face_normal(f).dot(p - vertices[faces[f][0]]);
  }

  std::size_t edge_count() const
  {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (const auto & t : faces) {
      for (int i = 0; i < 3; ++i) e.emplace_back(std::minmax(t[i], t[(i + 1) % 3]));
    }
    std::sort(e.begin(), e.end());
    return static_cast<std::size_t>(std::unique(e.begin(), e.end()) - e.begin());
  }
};

namespace detail {

class QuickHull
{
public:
  explicit QuickHull(std::span<const Vec3> pts) : pts_(pts) {}

  ConvexHull3 run()
  {
    if (pts_.size() < 4) throw DegenerateInputError("convex hull needs at least 4 points");
    Vec3 lo = pts_[0], hi = pts_[0];
    for (const auto & p : pts_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double scale = std::max((hi - lo).norm(), 1e-300);
    eps_ = 1e-12 * scale;
    initial_simplex(scale);
    expand();
    return extract();
  }

private:
  struct Face
  {
    std::array<std::size_t, 3> v;
    Vec3 n;
    double offset;
    bool alive{true};
    std::vector<std::size_t> outside;
  };

  static std::uint64_t key(std::size_t a, std::size_t b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

  double dist(const Face & f, const Vec3 & p) const { return f.n.dot(p) - f.offset; }

  std::size_t add_face(std::size_t a, std::size_t b, std::size_t c)
  {
    Face f;
    f.v = {a, b, c};
    const Vec3 cr = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double len = cr.norm();
    f.n = len > 0.0 ? Vec3(cr / len) : Vec3::Zero();
    f.offset = f.n.dot(pts_[a]);
    const std::size_t id = faces_.size();
    faces_.push_back(std::move(f));
    edges_[key(a, b)] = id;
    edges_[key(b, c)] = id;
    edges_[key(c, a)] = id;
    return id;
  }

  void initial_simplex(double scale)
  {
    // two points of maximal spread along one axis
    std::size_t i0 = 0, i1 = 0;
    double best = -1.0;
    for (int ax = 0; ax < 3; ++ax) {
      std::size_t mn = 0, mx = 0;
      for (std::size_t i = 0; i < pts_.size(); ++i) {
        if (pts_[i][ax] < pts_[mn][ax]) mn = i;
        if (pts_[i][ax] > pts_[mx][ax]) mx = i;
      }
      if (pts_[mx][ax] - pts_[mn][ax] > best) {
        best = pts_[mx][ax] - pts_[mn][ax];
        i0 = mn;
        i1 = mx;
      }
    }
    const double tol = 1e-10 * scale;
    if (best <= tol) throw DegenerateInputError("convex hull input is a single point");

    const Vec3 dir = (pts_[i1] - pts_[i0]).normalized();
    std::size_t i2 = 0;
    best = -1.0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const Vec3 r = pts_[i] - pts_[i0];
      const double d = (r - r.dot(dir) * dir).norm();
      if (d > best) {
        best = d;
        i2 = i;
      }
    }
    if (best <= tol) throw DegenerateInputError("convex hull input is collinear");

    const Vec3 nrm = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
    std::size_t i3 = 0;
    best = -1.0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const double d = std::abs(nrm.dot(pts_[i] - pts_[i0]));
      if (d > best) {
        best = d;
        i3 = i;
      }
    }
    if (best <= tol) throw DegenerateInputError("convex hull input is coplanar");

    if (nrm.dot(pts_[i3] - pts_[i0]) > 0.0) std::swap(i1, i2);  // apex below the base plane
    add_face(i0, i1, i2);
    add_face(i0, i3, i1);
    add_face(i1, i3, i2);
    add_face(i2, i3, i0);

    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      assign(i, 0, faces_.size());
    }
  }

  void assign(std::size_t p, std::size_t first_face, std::size_t end_face)
  {
    std::size_t best_face = end_face;
    double best = eps_;
    for (std::size_t f = first_face; f < end_face; ++f) {
      if (!faces_[f].alive) continue;
      const double d = dist(faces_[f], pts_[p]);
      if (d > best) {
        best = d;
        best_face = f;
      }
    }
    if (best_face != end_face) faces_[best_face].outside.push_back(p);
  }

  void expand()
  {
    std::vector<std::size_t> visible, stack, orphans;
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    std::uint32_t stamp = 0;
    for (std::size_t cursor = 0; cursor < faces_.size(); ++cursor) {
      if (!faces_[cursor].alive || faces_[cursor].outside.empty()) continue;
      Face & start = faces_[cursor];
      const std::size_t eye = *std::max_element(start.outside.begin(), start.outside.end(),
                                                [&](std::size_t a, std::size_t b) {
                                                  return dist(start, pts_[a]) < dist(start, pts_[b]);
                                                });
      const Vec3 & e = pts_[eye];

      // flood the faces that see the eye point
      visible.clear();
      horizon.clear();
      stamp += 2;
      mark_.resize(faces_.size(), 0);
      stack = {cursor};
      mark_[cursor] = stamp;
      while (!stack.empty()) {
        const std::size_t f = stack.back();
        stack.pop_back();
        visible.push_back(f);
        const auto & v = faces_[f].v;
        for (int k = 0; k < 3; ++k) {
          const std::size_t a = v[k], b = v[(k + 1) % 3];
          const std::size_t nb = edges_.at(key(b, a));
          if (mark_[nb] == stamp) continue;
          if (mark_[nb] == stamp + 1 || dist(faces_[nb], e) <= eps_) {
            mark_[nb] = stamp + 1;  // hidden
            horizon.emplace_back(a, b);
            continue;
          }
          mark_[nb] = stamp;
          stack.push_back(nb);
        }
      }

      orphans.clear();
      for (const std::size_t f : visible) {
        Face & face = faces_[f];
        face.alive = false;
        for (int k = 0; k < 3; ++k) edges_.erase(key(face.v[k], face.v[(k + 1) % 3]));
        for (const std::size_t p : face.outside) {
          if (p != eye) orphans.push_back(p);
        }
        face.outside.clear();
        face.outside.shrink_to_fit();
      }
      const std::size_t first_new = faces_.size();
      for (const auto & [a, b] : horizon) add_face(a, b, eye);
      for (const std::size_t p : orphans) assign(p, first_new, faces_.size());
    }
  }

  ConvexHull3 extract() const
  {
    ConvexHull3 hull;
    std::unordered_map<std::size_t, std::size_t> remap;
    for (const auto & f : faces_) {
      if (!f.alive) continue;
      std::array<std::size_t, 3> t{};
      for (int k = 0; k < 3; ++k) {
        auto [it, inserted] = remap.try_emplace(f.v[k], hull.vertices.size());
        if (inserted) {
          hull.vertices.push_back(pts_[f.v[k]]);
          hull.source_index.push_back(f.v[k]);
        }
        t[k] = it->second;
      }
      hull.faces.push_back(t);
    }
    return hull;
  }

  std::span<const Vec3> pts_;
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, std::size_t> edges_;
  std::vector<std::uint32_t> mark_;
  double eps_{0.0};
};

}  // namespace detail

/// Convex hull of at least four non-coplanar points; throws DegenerateInputError otherwise.
inline ConvexHull3 convex_hull_3d(std::span<const Vec3> points) { return detail::QuickHull(points).run(); }

/// Andrew's monotone chain. Returns the hull counterclockwise without collinear vertices.
inline std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts)
{
  std::sort(pts.begin(), pts.end(), [](const Vec2 & a, const Vec2 & b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto & p : pts) {
    while (k >= 2 && cross2(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

inline double polygon_area(std::span<const Vec2> poly)
{
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

/**
 * @brief Cross-section of @p hull with the plane z = @p z.
 *
 * The plane must pass strictly between the lowest and highest hull vertex,
 * otherwise EmptySliceError is raised. The result is a counterclockwise convex
 * polygon.
 */
inline std::vector<Vec2> slice_at_speed(const ConvexHull3 & hull, double z)
{
  double zmin = std::numeric_limits<double>::infinity(), zmax = -zmin;
  for (const auto & v : hull.vertices) {
    zmin = std::min(zmin, v.z());
    zmax = std::max(zmax, v.z());
  }
  if (!(z > zmin && z < zmax)) {
    throw EmptySliceError("slice plane z = " + std::to_string(z) + " outside hull range [" + std::to_string(zmin) +
                          ", " + std::to_string(zmax) + "]");
  }
  std::vector<Vec2> cut;
  for (const auto & t : hull.faces) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 & a = hull.vertices[t[k]];
      const Vec3 & b = hull.vertices[t[(k + 1) % 3]];
      const double sa = a.z() - z, sb = b.z() - z;
      if (sa == 0.0) cut.emplace_back(a.x(), a.y());
      if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
        const double w = sa / (sa - sb);
        cut.emplace_back(a.x() + w * (b.x() - a.x()), a.y() + w * (b.y() - a.y()));
      }
    }
  }
  auto poly = convex_hull_2d(std::move(cut));
  if (poly.size() < 3) throw EmptySliceError("slice at z = " + std::to_string(z) + " is degenerate");
  return poly;
}

}  // namespace socialzone

#endif  // SOCIALZONE_CONVEX_HULL_HPP
