#ifndef SOCIALZONE_TESTS_ORACLES_HPP
#define SOCIALZONE_TESTS_ORACLES_HPP

// Independent reference implementations used as test oracles. None of these call
// into the library's own versions of the same computation.

#include <socialzone/controller.hpp>
#include <socialzone/core.hpp>
#include <socialzone/dynamics.hpp>
#include <socialzone/scenarios.hpp>
#include <socialzone/simulator.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

using socialzone::Vec2;

/// Euclidean distance to the closed segment by clamped projection.
inline double exact_segment_distance(const Vec2 & x, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

/**
 * Textbook O(n^2) LOF. The k-neighborhood includes every point within the
 * k-distance (ties included, duplicates counted as distinct points), and a mean
 * reachability below @p min_mean_reach is clamped so exact duplicates score 1.
 */
template<typename Point>
std::vector<double> brute_force_lof(const std::vector<Point> & pts, std::size_t k, double min_mean_reach = 1e-10)
{
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i][j] = (pts[i] - pts[j]).norm();
  }
  std::vector<double> kdist(n);
  std::vector<std::vector<std::size_t>> hood(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(d[i][j]);
    }
    std::sort(others.begin(), others.end());
    kdist[i] = others[k - 1];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && d[i][j] <= kdist[i]) hood[i].push_back(j);
    }
  }
  std::vector<double> lrd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto j : hood[i]) s += std::max(kdist[j], d[i][j]);
    lrd[i] = 1.0 / std::max(s / static_cast<double>(hood[i].size()), min_mean_reach);
  }
  std::vector<double> lof(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto j : hood[i]) s += lrd[j];
    lof[i] = s / static_cast<double>(hood[i].size()) / lrd[i];
  }
  return lof;
}

/**
 * Finite-horizon LQ tracking of a rest point by backward Riccati recursion on the
 * error state, stage weights Q for steps 1..N-1 and P at step N. Returns the
 * stacked optimal open-loop controls u_0..u_{N-1}.
 */
inline Eigen::VectorXd riccati_lq(const socialzone::RobotState & x0, const Vec2 & goal,
                                  const socialzone::MpcConfig & cfg)
{
  const int N = cfg.N;
  Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
  A(0, 2) = A(1, 3) = cfg.dt;
  Eigen::Matrix<double, 4, 2> B = Eigen::Matrix<double, 4, 2>::Zero();
  B(0, 0) = B(1, 1) = 0.5 * cfg.dt * cfg.dt;
  B(2, 0) = B(3, 1) = cfg.dt;

  std::vector<Eigen::Matrix<double, 2, 4>> K(static_cast<std::size_t>(N));
  Eigen::Matrix4d S = cfg.P;
  for (int k = N - 1; k >= 0; --k) {
    const Eigen::Matrix2d G = cfg.R + B.transpose() * S * B;
    K[static_cast<std::size_t>(k)] = G.ldlt().solve(B.transpose() * S * A);
    const Eigen::Matrix4d Acl = A - B * K[static_cast<std::size_t>(k)];
    S = cfg.Q + A.transpose() * S * Acl;
  }
  Eigen::Vector4d e(x0.position.x() - goal.x(), x0.position.y() - goal.y(), x0.velocity.x(), x0.velocity.y());
  Eigen::VectorXd U(2 * N);
  for (int k = 0; k < N; ++k) {
    const Eigen::Vector2d u = -K[static_cast<std::size_t>(k)] * e;
    U.segment<2>(2 * k) = u;
    e = A * e + B * u;
  }
  return U;
}

/// Discrete CBF inequality h[k+1] - h[k] >= -gamma h[k] - tol on logged rows that
/// came from an optimal solve. Returns the worst slack (negative means violated).
inline double worst_cbf_slack(const socialzone::SimLog & log, std::size_t * checked = nullptr)
{
  double worst = std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (std::size_t k = 0; k + 1 < log.rows.size(); ++k) {
    if (log.rows[k].status != "optimal") continue;
    for (std::size_t j = 0; j < log.rows[k].h.size(); ++j) {
      const double hk = log.rows[k].h[j], hk1 = log.rows[k + 1].h[j];
      worst = std::min(worst, hk1 - hk + log.gamma * hk);
      ++n;
    }
  }
  if (checked) *checked = n;
  return worst;
}

/// Behavioral markers of the built-in scenarios, computed from the log alone.
struct Markers
{
  double lateral_min{0.0};  ///< signed deviation from the start-goal line (left positive)
  double lateral_max{0.0};
  double encounter_min_speed{std::numeric_limits<double>::infinity()};
  double longest_wait_before_clear{0.0};  ///< seconds below 0.1 m/s before the person clears the gap
  double clear_time{-1.0};
};

inline Markers scenario_markers(const socialzone::ScenarioConfig & cfg, const socialzone::SimLog & log,
                                const socialzone::ZoneModel & model)
{
  using namespace socialzone;
  Markers m;
  const Vec2 start = cfg.start.position;
  const Vec2 dir = (cfg.goal - start).normalized();
  double run = 0.0;
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    const auto & r = log.rows[k];
    const Vec2 rel = r.state.position - start;
    const double lateral = dir.x() * rel.y() - dir.y() * rel.x();
    m.lateral_min = std::min(m.lateral_min, lateral);
    m.lateral_max = std::max(m.lateral_max, lateral);
    if (cfg.humans.empty()) continue;

    const HumanState h = predict_human(cfg.humans.front(), static_cast<long>(k), log.dt);
    const double speed = r.state.velocity.norm();
    // encounter: the person is within 3 m along the travel direction
    if (std::abs((h.position - r.state.position).dot(dir)) < 3.0) {
      m.encounter_min_speed = std::min(m.encounter_min_speed, speed);
    }
    if (!cfg.walls.empty() && m.clear_time < 0.0) {
      // cleared once the whole zone has passed the wall line x = 0 heading -x
      const Ellipse e = zone_at(h, model, cfg.zone_query_speed).world;
      bool clear = true;
      for (int i = 0; i < 128 && clear; ++i) clear = e.boundary_point(2.0 * kPi * i / 128).x() < 0.0;
      if (clear) m.clear_time = r.t;
    }
    if (m.clear_time < 0.0 && k > 0 && speed < 0.1) {
      run += log.dt;
      m.longest_wait_before_clear = std::max(m.longest_wait_before_clear, run);
    } else {
      run = 0.0;
    }
  }
  return m;
}

}  // namespace oracle

#endif  // SOCIALZONE_TESTS_ORACLES_HPP
