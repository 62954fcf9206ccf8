#ifndef SOCIALZONE_GEOMETRY_HPP
#define SOCIALZONE_GEOMETRY_HPP

/**
 * @file
 * @brief Closed-form approximate distance functions and the barriers built on them.
 *
 * Segment distance is the R-function construction
 *   g(x) = [(x - xa)(yb - ya) - (y - ya)(xb - xa)] / L          (signed line distance)
 *   t(x) = [(L/2)^2 - |x - xc|^2] / L                            (trimming disk)
 *   d(x) = sqrt(g^2 + (|t| - t)^2 / 4)
 * which is exact wherever t >= 0 and overestimates past the endpoints.
 *
 * Ellipse distance is the focal-sum form d(x) = (|x - ca| + |x - cb|) / 2 - a:
 * zero on the ellipse, negative inside, positive outside.
 */

#include "core.hpp"

#include <cmath>
#include <variant>

namespace socialzone {

class Segment
{
public:
  Segment(Vec2 a, Vec2 b) : a_(std::move(a)), b_(std::move(b))
  {
    if (!((b_ - a_).norm() > 0.0)) throw DegenerateInputError("segment endpoints coincide");
  }

  const Vec2 & a() const { return a_; }
  const Vec2 & b() const { return b_; }
  double length() const { return (b_ - a_).norm(); }
  Vec2 midpoint() const { return 0.5 * (a_ + b_); }

private:
  Vec2 a_, b_;
};

/// Rotated ellipse. a >= b > 0; a == b is allowed and gives coincident foci.
class Ellipse
{
public:
  Ellipse(Vec2 center, double a, double b, double theta) : center_(std::move(center)), a_(a), b_(b), theta_(theta)
  {
    if (!(b_ > 0.0) || !(a_ >= b_) || !std::isfinite(a_)) {
      throw DegenerateInputError("ellipse requires a >= b > 0");
    }
  }

  const Vec2 & center() const { return center_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double theta() const { return theta_; }

  double focal_half_distance() const { return std::sqrt(std::max(a_ * a_ - b_ * b_, 0.0)); }
  Vec2 major_axis() const { return {std::cos(theta_), std::sin(theta_)}; }
  Vec2 focus_a() const { return center_ + focal_half_distance() * major_axis(); }
  Vec2 focus_b() const { return center_ - focal_half_distance() * major_axis(); }
  double area() const { return kPi * a_ * b_; }

  /// Point at parameter s: center + R(theta) (a cos s, b sin s).
  Vec2 boundary_point(double s) const { return center_ + rotate(Vec2(a_ * std::cos(s), b_ * std::sin(s)), theta_); }

  /// Implicit-form residual: ((R^T (x - c))_x / a)^2 + ((R^T (x - c))_y / b)^2 - 1.
  double implicit_residual(const Vec2 & x) const
  {
    const Vec2 q = rotate(x - center_, -theta_);
    return (q.x() / a_) * (q.x() / a_) + (q.y() / b_) * (q.y() / b_) - 1.0;
  }

private:
  Vec2 center_;
  double a_, b_, theta_;
};

using Shape = std::variant<Segment, Ellipse>;

/// Signed distance to the infinite line through the segment; flips sign on endpoint swap.
inline double signed_line_distance(const Vec2 & x, const Segment & s)
{
  const Vec2 & pa = s.a();
  const Vec2 & pb = s.b();
  return ((x.x() - pa.x()) * (pb.y() - pa.y()) - (x.y() - pa.y()) * (pb.x() - pa.x())) / s.length();
}

inline double trim(const Vec2 & x, const Segment & s)
{
  const double half = 0.5 * s.length();
  return (half * half - (x - s.midpoint()).squaredNorm()) / s.length();
}

inline double segment_distance(const Vec2 & x, const Segment & s)
{
  const double g = signed_line_distance(x, s);
  const double t = trim(x, s);
  const double w = std::abs(t) - t;
  return std::sqrt(g * g + w * w / 4.0);
}

inline double ellipse_distance(const Vec2 & x, const Ellipse & e)
{
  return 0.5 * ((x - e.focus_a()).norm() + (x - e.focus_b()).norm()) - e.a();
}

inline double distance(const Vec2 & x, const Shape & shape)
{
  return std::visit(
    [&](const auto & s) {
      if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Segment>) {
        return segment_distance(x, s);
      } else {
        return ellipse_distance(x, s);
      }
    },
    shape);
}

/// h(x) = d(x, shape) - clearance - margin.
struct Barrier
{
  Shape shape;
  double clearance{0.0};
  double margin{0.0};

  Barrier(Shape s, double clearance_m, double margin_m) : shape(std::move(s)), clearance(clearance_m), margin(margin_m)
  {
    if (!(clearance >= 0.0) || !(margin >= 0.0)) throw ConfigError("barrier clearance and margin must be >= 0");
  }
};

inline double barrier_value(const Vec2 & x, const Barrier & barrier)
{
  return distance(x, barrier.shape) - barrier.clearance - barrier.margin;
}

namespace detail {

inline constexpr double kGradientSmoothing = 1e-9;

inline Vec2 segment_distance_gradient(const Vec2 & x, const Segment & s)
{
  const double L = s.length();
  const Vec2 grad_g = Vec2(s.b().y() - s.a().y(), -(s.b().x() - s.a().x())) / L;
  const Vec2 grad_t = -2.0 * (x - s.midpoint()) / L;
  const double g = signed_line_distance(x, s);
  const double t = trim(x, s);
  // |t| replaced by sqrt(t^2 + delta^2) so the gradient stays continuous
  const double st = std::sqrt(t * t + kGradientSmoothing * kGradientSmoothing);
  const double w = st - t;
  const double d = std::sqrt(g * g + w * w / 4.0);
  if (d < kGradientSmoothing) return grad_g;  // on the segment: unit normal as subgradient
  return (g * grad_g + 0.25 * w * (t / st - 1.0) * grad_t) / d;
}

inline Vec2 ellipse_distance_gradient(const Vec2 & x, const Ellipse & e)
{
  Vec2 grad = Vec2::Zero();
  for (const Vec2 & f : {e.focus_a(), e.focus_b()}) {
    const Vec2 r = x - f;
    const double n = r.norm();
    if (n > kGradientSmoothing) grad += 0.5 * r / n;
  }
  return grad;
}

}  // namespace detail

/// Analytic gradient of barrier_value with respect to the query point.
inline Vec2 barrier_gradient(const Vec2 & x, const Barrier & barrier)
{
  return std::visit(
    [&](const auto & s) -> Vec2 {
      if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Segment>) {
        return detail::segment_distance_gradient(x, s);
      } else {
        return detail::ellipse_distance_gradient(x, s);
      }
    },
    barrier.shape);
}

}  // namespace socialzone

#endif  // SOCIALZONE_GEOMETRY_HPP
