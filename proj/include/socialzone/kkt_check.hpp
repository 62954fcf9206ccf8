#ifndef SOCIALZONE_KKT_CHECK_HPP
#define SOCIALZONE_KKT_CHECK_HPP

// Solver-agnostic first-order optimality check for an OcpSolution.
//
// Rebuilds the trajectory with step_robot, the cost gradient with a backward
// adjoint sweep and the constraint Jacobian with central differences of
// barrier_value, so it shares no derivative code with the solver.

#include "controller.hpp"
#include "dynamics.hpp"
#include "geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace socialzone {

struct KktReport
{
  double dynamics_residual{0.0};
  double max_violation{0.0};
  double stationarity{0.0};
  double complementarity{0.0};
  double dual_infeasibility{0.0};

  double kkt_residual() const { return std::max({stationarity, complementarity, dual_infeasibility}); }
};

namespace detail {

inline std::vector<RobotState> rollout(const RobotState & x0, const Eigen::VectorXd & U, double dt)
{
  std::vector<RobotState> xs;
  RobotState x = x0;
  for (Eigen::Index k = 0; 2 * k < U.size(); ++k) {
    x = step_robot(x, {U.segment<2>(2 * k)}, dt);
    xs.push_back(x);
  }
  return xs;
}

inline Eigen::VectorXd reference_constraints(const Ocp & ocp, const Eigen::VectorXd & U)
{
  const MpcConfig & cfg = ocp.config();
  const auto xs = rollout(ocp.x0(), U, cfg.dt);
  Eigen::VectorXd c(ocp.num_constraints());
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < U.size(); ++i) c[row++] = cfg.u_max - U[i];
  for (Eigen::Index i = 0; i < U.size(); ++i) c[row++] = U[i] + cfg.u_max;
  for (const auto & x : xs) c[row++] = cfg.v_max * cfg.v_max - x.velocity.squaredNorm();
  for (std::size_t j = 0; j < ocp.barriers().size(); ++j) {
    for (int k = 0; k < cfg.Nh; ++k) {
      const Vec2 p0 = k == 0 ? ocp.x0().position : xs[k - 1].position;
      c[row++] = barrier_value(xs[k].position, ocp.barrier_at(j, k + 1)) -
                 (1.0 - cfg.gamma) * barrier_value(p0, ocp.barrier_at(j, k));
    }
  }
  return c;
}

/// Gradient of the tracking cost by reverse sweep over the rollout.
inline Eigen::VectorXd reference_cost_gradient(const Ocp & ocp, const Eigen::VectorXd & U)
{
  const MpcConfig & cfg = ocp.config();
  const int N = cfg.N;
  const auto xs = rollout(ocp.x0(), U, cfg.dt);
  const Eigen::Matrix4d A = robot_transition(cfg.dt);
  const Eigen::Matrix<double, 4, 2> B = robot_input_matrix(cfg.dt);
  const Eigen::Vector4d target(ocp.goal().x(), ocp.goal().y(), 0.0, 0.0);
  Eigen::VectorXd grad(2 * N);
  Eigen::Vector4d adj = Eigen::Vector4d::Zero();  // d cost / d x_{k+1}
  for (int k = N - 1; k >= 0; --k) {
    const Eigen::Matrix4d & W = k == N - 1 ? cfg.P : cfg.Q;
    adj += 2.0 * W * (xs[k].stacked() - target);
    grad.segment<2>(2 * k) = B.transpose() * adj + 2.0 * cfg.R * U.segment<2>(2 * k);
    adj = A.transpose() * adj;
  }
  return grad;
}

}  // namespace detail

/// Residuals of @p sol against the KKT conditions of @p ocp.
inline KktReport check_kkt(const Ocp & ocp, const OcpSolution & sol, double fd_step = 1e-6)
{
  KktReport r;
  const Eigen::VectorXd U = sol.stacked_controls();
  const auto xs = detail::rollout(ocp.x0(), U, ocp.config().dt);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    r.dynamics_residual =
        std::max(r.dynamics_residual, (xs[k].stacked() - sol.states[k].stacked()).lpNorm<Eigen::Infinity>());
  }
  const Eigen::VectorXd c = detail::reference_constraints(ocp, U);
  r.max_violation = std::max(0.0, -c.minCoeff());

  Eigen::MatrixXd J(c.size(), U.size());
  for (Eigen::Index i = 0; i < U.size(); ++i) {
    Eigen::VectorXd up = U, dn = U;
    up[i] += fd_step;
    dn[i] -= fd_step;
    J.col(i) = (detail::reference_constraints(ocp, up) - detail::reference_constraints(ocp, dn)) / (2.0 * fd_step);
  }
  const Eigen::VectorXd & lam = sol.multipliers;
  r.stationarity = (detail::reference_cost_gradient(ocp, U) - J.transpose() * lam).lpNorm<Eigen::Infinity>();
  r.complementarity = lam.cwiseProduct(c).cwiseAbs().maxCoeff();
  r.dual_infeasibility = std::max(0.0, -lam.minCoeff());
  return r;
}

}  // namespace socialzone

#endif  // SOCIALZONE_KKT_CHECK_HPP
