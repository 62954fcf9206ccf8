#ifndef SOCIALZONE_DYNAMICS_HPP
#define SOCIALZONE_DYNAMICS_HPP

// Planar double integrator for the robot and constant-velocity prediction for people.

#include "core.hpp"
#include "geometry.hpp"
#include "log.hpp"
#include "zone_model.hpp"

#include <Eigen/Core>

#include <algorithm>

namespace socialzone {

struct RobotState
{
  Vec2 position{Vec2::Zero()};
  Vec2 velocity{Vec2::Zero()};

  Eigen::Vector4d stacked() const { return {position.x(), position.y(), velocity.x(), velocity.y()}; }
  static RobotState from_stacked(const Eigen::Vector4d & x) { return {x.head<2>(), x.tail<2>()}; }
};

/// Acceleration command, m/s^2.
struct ControlInput
{
  Vec2 accel{Vec2::Zero()};
};

struct HumanState
{
  Vec2 position{Vec2::Zero()};
  Vec2 velocity{Vec2::Zero()};
  double facing{0.0};  ///< heading used while standing still

  double heading() const
  {
    return velocity.norm() > 1e-9 ? std::atan2(velocity.y(), velocity.x()) : facing;
  }
};

/// p += v dt + u dt^2 / 2, v += u dt. Exact for piecewise-constant acceleration.
inline RobotState step_robot(const RobotState & s, const ControlInput & u, double dt)
{
  return {s.position + dt * s.velocity + 0.5 * dt * dt * u.accel, s.velocity + dt * u.accel};
}

/// State transition and input matrices of step_robot.
inline Eigen::Matrix4d robot_transition(double dt)
{
  Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
  A(0, 2) = dt;
  A(1, 3) = dt;
  return A;
}

inline Eigen::Matrix<double, 4, 2> robot_input_matrix(double dt)
{
  Eigen::Matrix<double, 4, 2> B = Eigen::Matrix<double, 4, 2>::Zero();
  B(0, 0) = B(1, 1) = 0.5 * dt * dt;
  B(2, 0) = B(3, 1) = dt;
  return B;
}

/// Constant-velocity prediction @p k steps ahead.
inline HumanState predict_human(const HumanState & h, long k, double dt)
{
  HumanState out = h;
  out.position = h.position + static_cast<double>(k) * dt * h.velocity;
  return out;
}

struct ZoneSelection
{
  Ellipse world;
  double model_speed;
  bool clamped;
};

/**
 * @brief World-frame zone of @p human for the query speed.
 *
 * Picks the smallest modeled speed >= @p query_speed (never interpolates);
 * queries outside the modeled range clamp to the nearest end with a warning.
 */
inline ZoneSelection zone_at(const HumanState & human, const ZoneModel & model, double query_speed)
{
  if (model.empty()) throw ConfigError("zone model is empty");
  std::size_t idx = model.speeds.size() - 1;
  bool clamped = false;
  const auto it = std::lower_bound(model.speeds.begin(), model.speeds.end(), query_speed - 1e-12);
  if (it == model.speeds.end()) {
    clamped = true;
  } else {
    idx = static_cast<std::size_t>(it - model.speeds.begin());
    clamped = idx == 0 && query_speed < model.speeds.front() - 1e-12;
  }
  if (clamped) {
    log::warn("query speed ", query_speed, " m/s outside zone model range; using ", model.speeds[idx], " m/s");
  }
  const SocialZone & z = model.zones[idx];
  const double heading = human.heading();
  return {Ellipse(human.position + rotate(z.center, heading), z.a, z.b, normalize_angle(z.theta + heading)),
          model.speeds[idx], clamped};
}

}  // namespace socialzone

#endif  // SOCIALZONE_DYNAMICS_HPP
