#ifndef SOCIALZONE_ZONELEARN_HPP
#define SOCIALZONE_ZONELEARN_HPP

/**
 * @file
 * @brief From encounter records to a speed-indexed minimum social zone.
 *
 * Records are mapped to complementary distance r' = r_max - r so that the zone
 * boundary (the smallest distances) becomes the outer boundary of the point cloud.
 * In (x', y', speed) space we drop LOF outliers, take the 3D convex hull, cut it
 * at each requested speed and fit the minimum enclosing ellipse to the cut. The
 * boundary of that ellipse is mapped back to true distances along rays from the
 * pedestrian and a second enclosing ellipse is fitted in the body frame.
 */

#include "convex_hull.hpp"
#include "core.hpp"
#include "enclosing_ellipse.hpp"
#include "interaction.hpp"
#include "lof.hpp"
#include "log.hpp"
#include "zone_model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socialzone {

struct ZoneLearnParams
{
  double r_max{2.0};
  std::size_t k{20};
  double fraction{0.002};
  double speed_scale{1.0};  ///< meters per (m/s) when speed enters the LOF metric
  std::vector<double> speeds{0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6};
  std::size_t boundary_rays{720};
  double support_gap{kPi / 6};  ///< bearing gaps wider than this bound the angular support
};

/// (x', y', speed) with x' = r' cos(los), y' = r' sin(los), r' = r_max - min(r, r_max).
inline std::vector<Vec3> to_complement(std::span<const InteractionRecord> records, double r_max = 2.0)
{
  std::vector<Vec3> out;
  out.reserve(records.size());
  for (const auto & r : records) {
    const double rc = r_max - std::clamp(r.distance, 0.0, r_max);
    out.emplace_back(rc * std::cos(r.los_angle), rc * std::sin(r.los_angle), r.ref_speed);
  }
  return out;
}

/// Closed bearing interval [lo, hi] (hi - lo <= 2 pi) covered by data.
struct BearingRange
{
  double lo{-kPi};
  double hi{kPi};
  bool full() const { return hi - lo >= 2.0 * kPi - 1e-12; }
};

/// Complement of the widest gap between observed bearings, or the full circle if no
/// gap exceeds @p max_gap.
inline BearingRange angular_support(std::vector<double> bearings, double max_gap)
{
  if (bearings.size() < 2) return {};
  std::sort(bearings.begin(), bearings.end());
  double widest = bearings.front() + 2.0 * kPi - bearings.back();
  std::size_t after = 0;  // bearing right after the widest gap
  for (std::size_t i = 1; i < bearings.size(); ++i) {
    const double gap = bearings[i] - bearings[i - 1];
    if (gap > widest) {
      widest = gap;
      after = i;
    }
  }
  if (widest <= max_gap) return {};
  const double lo = bearings[after];
  const double hi = after == 0 ? bearings.back() : bearings[after - 1] + 2.0 * kPi;
  return {lo, hi};
}

/// Farthest intersection of the ray s * dir (s >= 0) with the ellipse boundary.
inline std::optional<double> ray_exit(const Ellipse & e, const Vec2 & dir)
{
  const Vec2 c = e.center();
  const Vec2 du = rotate(dir, -e.theta());
  const Vec2 cu = rotate(c, -e.theta());
  const double ia = 1.0 / (e.a() * e.a()), ib = 1.0 / (e.b() * e.b());
  const double A = du.x() * du.x() * ia + du.y() * du.y() * ib;
  const double B = -2.0 * (du.x() * cu.x() * ia + du.y() * cu.y() * ib);
  const double C = cu.x() * cu.x() * ia + cu.y() * cu.y() * ib - 1.0;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return std::nullopt;
  const double s = (-B + std::sqrt(disc)) / (2.0 * A);
  if (!(s > 0.0)) return std::nullopt;
  return s;
}

/**
 * @brief Maps an ellipse fitted in complementary coordinates back to body-frame
 * boundary points.
 *
 * Along each bearing in @p support the farthest complementary radius r' becomes a
 * boundary point at true distance r_max - r'.
 */
inline std::vector<Vec2> true_boundary(const Ellipse & complement_fit, const BearingRange & support, double r_max,
                                       std::size_t rays)
{
  std::vector<Vec2> pts;
  const bool full = support.full();
  for (std::size_t i = 0; i < rays; ++i) {
    const double w = full ? static_cast<double>(i) / static_cast<double>(rays)
                          : static_cast<double>(i) / static_cast<double>(rays - 1);
    const double phi = support.lo + w * (support.hi - support.lo);
    const Vec2 dir(std::cos(phi), std::sin(phi));
    const auto s = ray_exit(complement_fit, dir);
    if (!s) continue;
    const double rc = std::min(*s, r_max);
    pts.push_back((r_max - rc) * dir);
  }
  return pts;
}

struct ZoneLearnResult
{
  ZoneModel model;
  std::vector<std::string> warnings;
  std::size_t inliers{0};
  std::size_t outliers{0};
  std::size_t hull_vertices{0};
  std::vector<std::vector<Vec2>> slices;  ///< complementary-frame polygon per kept speed
};

inline ZoneLearnResult build_zone_model(std::span<const InteractionRecord> records, const ZoneLearnParams & p = {})
{
  ZoneLearnResult res;
  res.model.provenance = {records.size(), p.k, p.fraction, p.r_max, "learned"};
  auto warn = [&](std::string msg) {
    log::warn(msg);
    res.warnings.push_back(std::move(msg));
  };
  if (records.empty()) {
    warn("no interaction records; zone model is empty");
    return res;
  }

  const auto pts = to_complement(records, p.r_max);
  std::vector<Vec3> scaled(pts);
  for (auto & q : scaled) q.z() *= p.speed_scale;
  const auto split = remove_outliers<3>(std::span<const Vec3>(scaled), p.fraction, p.k);
  res.inliers = split.inliers.size();
  res.outliers = split.outliers.size();

  std::vector<Vec3> kept;
  std::vector<double> bearings;
  kept.reserve(split.inliers.size());
  for (const std::size_t i : split.inliers) {
    kept.push_back(pts[i]);
    if (records[i].distance < p.r_max) bearings.push_back(normalize_angle(records[i].los_angle));
  }
  const BearingRange support = angular_support(std::move(bearings), p.support_gap);

  ConvexHull3 hull;
  try {
    hull = convex_hull_3d(kept);
  } catch (const Error & e) {
    warn(std::string("convex hull failed: ") + e.what());
    return res;
  }
  res.hull_vertices = hull.vertices.size();

  for (const double speed : p.speeds) {
    try {
      auto poly = slice_at_speed(hull, speed);
      const Ellipse complement_fit = min_enclosing_ellipse(poly);
      const auto boundary = true_boundary(complement_fit, support, p.r_max, p.boundary_rays);
      const Ellipse zone = min_enclosing_ellipse(boundary);
      if (!res.model.speeds.empty() && !(speed > res.model.speeds.back())) {
        warn("speed grid not ascending at " + std::to_string(speed) + "; skipped");
        continue;
      }
      res.model.speeds.push_back(speed);
      res.model.zones.push_back(SocialZone::from_ellipse(zone));
      res.slices.push_back(std::move(poly));
    } catch (const Error & e) {
      warn("speed " + std::to_string(speed) + " m/s omitted: " + e.what());
    }
  }
  return res;
}

}  // namespace socialzone

#endif  // SOCIALZONE_ZONELEARN_HPP
