#ifndef SOCIALZONE_CORE_HPP
#define SOCIALZONE_CORE_HPP

/**
 * @file
 * @brief Shared vocabulary: 2D vector alias, angle helpers and the error hierarchy.
 */

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace socialzone {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a)
{
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

/// Counterclockwise rotation of @p v by @p angle.
inline Vec2 rotate(const Vec2 & v, double angle)
{
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

inline double cross2(const Vec2 & a, const Vec2 & b) { return a.x() * b.y() - a.y() * b.x(); }

/// Base for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or stream.
class ParseError : public Error
{
public:
  using Error::Error;
};

/// Geometric degeneracy (coplanar hull input, collinear ellipse input, ...).
class DegenerateInputError : public Error
{
public:
  using Error::Error;
};

/// A plane that misses the hull's extent.
class EmptySliceError : public Error
{
public:
  using Error::Error;
};

/// Scenario or pipeline configuration that violates its invariants.
class ConfigError : public Error
{
public:
  using Error::Error;
};

}  // namespace socialzone

#endif  // SOCIALZONE_CORE_HPP
