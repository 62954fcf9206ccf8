#ifndef SOCIALZONE_ENCLOSING_ELLIPSE_HPP
#define SOCIALZONE_ENCLOSING_ELLIPSE_HPP

/**
 * @file
 * @brief Minimum-area enclosing ellipse (Loewner-John ellipse) of a planar point set.
 *
 * Solved as the dual D-optimal design problem on the lifted points q = (p, 1):
 * maximise log det(sum u_i q_i q_i^T) over the simplex. The iteration is the
 * Wolfe-Atwood scheme with away steps (Todd & Yildirim), which converges linearly
 * to the optimum; it stops when every lifted point satisfies
 * |q^T X^-1 q / 3 - 1| <= tol on the support and q^T X^-1 q / 3 - 1 <= tol
 * elsewhere. The final ellipse is rescaled so that the farthest input point lies
 * exactly on it.
 */

#include "core.hpp"
#include "geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace socialzone {

struct EnclosingEllipseOptions
{
  double tolerance{1e-11};
  int max_iterations{200000};
};

namespace detail {

/// Converts the quadratic form (x - c)^T M (x - c) <= 1 into axis parameters.
inline Ellipse ellipse_from_form(const Vec2 & center, const Eigen::Matrix2d & M)
{
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
  const Eigen::Vector2d lam = es.eigenvalues();  // ascending
  const Eigen::Vector2d major = es.eigenvectors().col(0);
  double theta = std::atan2(major.y(), major.x());
  if (theta > kPi / 2) theta -= kPi;
  if (theta <= -kPi / 2) theta += kPi;
  const double a = 1.0 / std::sqrt(lam[0]);
  const double b = std::min(a, 1.0 / std::sqrt(lam[1]));
  return Ellipse(center, a, b, theta);
}

}  // namespace detail

/**
 * @brief Smallest-area ellipse containing all @p pts.
 *
 * Requires at least three non-collinear points; throws DegenerateInputError otherwise.
 */
inline Ellipse min_enclosing_ellipse(std::span<const Vec2> pts, const EnclosingEllipseOptions & opt = {})
{
  const std::size_t n = pts.size();
  if (n < 3) throw DegenerateInputError("enclosing ellipse needs at least 3 points");

  // collinearity check on the scatter matrix
  Vec2 mean = Vec2::Zero();
  for (const auto & p : pts) mean += p;
  mean /= static_cast<double>(n);
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto & p : pts) scatter += (p - mean) * (p - mean).transpose();
  const Eigen::Vector2d sev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(scatter, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(sev[1] > 0.0) || sev[0] <= 1e-14 * sev[1]) throw DegenerateInputError("enclosing ellipse input is collinear");

  // centre and scale for conditioning; undone at the end
  double spread = std::sqrt(sev[1] / static_cast<double>(n));
  std::vector<Eigen::Vector3d> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = (pts[i] - mean) / spread;
    q[i] = Eigen::Vector3d(p.x(), p.y(), 1.0);
  }

  constexpr double dim = 3.0;
  std::vector<double> u(n, 1.0 / static_cast<double>(n));
  std::vector<double> omega(n);
  auto evaluate = [&] {
    Eigen::Matrix3d X = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < n; ++i) X.noalias() += u[i] * q[i] * q[i].transpose();
    const Eigen::Matrix3d Xinv = X.inverse();
    for (std::size_t i = 0; i < n; ++i) omega[i] = q[i].dot(Xinv * q[i]);
  };

  for (int it = 0; it < opt.max_iterations; ++it) {
    evaluate();
    std::size_t up = 0, down = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (omega[i] > omega[up]) up = i;
      if (u[i] > 0.0 && (down == n || omega[i] < omega[down])) down = i;
    }
    const double eps_up = omega[up] / dim - 1.0;
    const double eps_down = 1.0 - omega[down] / dim;
    if (eps_up <= opt.tolerance && eps_down <= opt.tolerance) break;

    if (eps_up >= eps_down) {
      const double tau = (omega[up] - dim) / (dim * (omega[up] - 1.0));
      for (auto & w : u) w *= (1.0 - tau);
      u[up] += tau;
    } else {
      const double wk = omega[down];
      double tau = (dim - wk) / (dim * (wk - 1.0));
      if (wk <= 1.0) tau = u[down] / (1.0 - u[down]);
      tau = std::min(tau, u[down] / (1.0 - u[down]));
      for (auto & w : u) w *= (1.0 + tau);
      u[down] -= tau;
      if (u[down] < 1e-300) u[down] = 0.0;
    }
  }

  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) c += u[i] * q[i].head<2>();
  Eigen::Matrix2d S = -c * c.transpose();
  for (std::size_t i = 0; i < n; ++i) S += u[i] * q[i].head<2>() * q[i].head<2>().transpose();
  Eigen::Matrix2d M = S.inverse() / 2.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 r = q[i].head<2>() - c;
    worst = std::max(worst, r.dot(M * r));
  }
  M /= worst;

  // back to input coordinates
  const Vec2 center = mean + spread * c;
  return detail::ellipse_from_form(center, M / (spread * spread));
}

/// Largest value of the implicit form (x - c)^T M (x - c) over @p pts; <= 1 means contained.
inline double max_normalized_radius(const Ellipse & e, std::span<const Vec2> pts)
{
  double worst = 0.0;
  for (const auto & p : pts) worst = std::max(worst, e.implicit_residual(p) + 1.0);
  return worst;
}

}  // namespace socialzone

#endif  // SOCIALZONE_ENCLOSING_ELLIPSE_HPP
