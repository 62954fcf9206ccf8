#ifndef SOCIALZONE_CONTROLLER_HPP
#define SOCIALZONE_CONTROLLER_HPP

/**
 * @file
 * @brief Receding-horizon controller with discrete-time barrier constraints.
 *
 * Decision variables are the N accelerations u_0..u_{N-1}; the states follow
 * from the exactly linear double integrator, so the rollout is condensed into
 * x = Sx x0 + Su U. The program is
 *
 *   min  sum_{k=1}^{N-1} e_k^T Q e_k + e_N^T P e_N + sum_{k=0}^{N-1} u_k^T R u_k,   e_k = x_k - (goal, 0, 0)
 *   s.t. |u_k|_i <= u_max                                  (box)
 *        |v_k|^2 <= v_max^2,              k = 1..N         (speed)
 *        h_{k+1}(x_{k+1}) - h_k(x_k) >= -gamma h_k(x_k),  k = 0..N_h-1, every barrier
 *
 * where h_k is the barrier instantiated at the predicted obstacle pose of step k.
 * Constraint rows are ordered: upper box (2N), lower box (2N), speed (N), then the
 * barrier rows barrier-major (j * N_h + k). Multipliers use the same order.
 *
 * The solver is an S-l1-QP loop: each iterate solves a convex QP with linearized
 * speed and barrier rows, elastic slacks on those rows, and an l1 merit line
 * search.
 */

#include "core.hpp"
#include "dynamics.hpp"
#include "geometry.hpp"
#include "qp.hpp"
#include "zone_model.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socialzone {

struct MpcConfig
{
  int N{8};
  int Nh{2};
  double dt{0.1};
  double gamma{0.3};
  Eigen::Matrix4d Q{Eigen::Vector4d(1.0, 1.0, 0.1, 0.1).asDiagonal()};
  Eigen::Matrix4d P{Eigen::Matrix4d(Eigen::Vector4d(10.0, 10.0, 1.0, 1.0).asDiagonal())};
  Eigen::Matrix2d R{Eigen::Vector2d(0.1, 0.1).asDiagonal()};
  double v_max{1.0};
  double u_max{2.0};

  void validate() const
  {
    if (N < 1 || Nh < 1 || Nh > N) throw ConfigError("MPC horizons need 1 <= N_h <= N");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(v_max > 0.0) || !(u_max > 0.0)) throw ConfigError("v_max and u_max must be positive");
    auto psd = [](const auto & M) {
      if (!M.isApprox(M.transpose(), 1e-12)) return false;
      Eigen::SelfAdjointEigenSolver<std::decay_t<decltype(M)>> es(M, Eigen::EigenvaluesOnly);
      return es.eigenvalues().minCoeff() >= -1e-12;
    };
    if (!psd(P) || !psd(Q) || !psd(R)) throw ConfigError("P, Q, R must be symmetric positive semidefinite");
  }
};

enum class SolverStatus { optimal, feasible_suboptimal, infeasible };

inline std::string to_string(SolverStatus s)
{
  switch (s) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::feasible_suboptimal: return "feasible_suboptimal";
    case SolverStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

/// One barrier over the horizon: instance k is the obstacle at predicted step k.
/// Shorter sequences repeat their last instance (static obstacles need only one).
using BarrierTrack = std::vector<Barrier>;

/// Condensed optimal control problem.
class Ocp
{
public:
  Ocp(RobotState x0, Vec2 goal, std::vector<BarrierTrack> barriers, MpcConfig cfg)
      : x0_(std::move(x0)), goal_(std::move(goal)), barriers_(std::move(barriers)), cfg_(std::move(cfg))
  {
    cfg_.validate();
    for (const auto & b : barriers_) {
      if (b.empty()) throw ConfigError("barrier track without instances");
    }
    const int N = cfg_.N;
    const Eigen::Matrix4d A = robot_transition(cfg_.dt);
    const Eigen::Matrix<double, 4, 2> B = robot_input_matrix(cfg_.dt);
    Sx_.resize(4 * N, 4);
    Su_ = Eigen::MatrixXd::Zero(4 * N, 2 * N);
    Eigen::Matrix4d Ak = Eigen::Matrix4d::Identity();
    std::vector<Eigen::Matrix<double, 4, 2>> AkB(N);
    for (int k = 0; k < N; ++k) {
      AkB[k] = Ak * B;
      Ak = A * Ak;
      Sx_.block<4, 4>(4 * k, 0) = Ak;
    }
    for (int k = 1; k <= N; ++k) {
      for (int j = 0; j < k; ++j) Su_.block<4, 2>(4 * (k - 1), 2 * j) = AkB[k - 1 - j];
    }
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(4 * N, 4 * N);
    for (int k = 1; k <= N; ++k) W.block<4, 4>(4 * (k - 1), 4 * (k - 1)) = k == N ? cfg_.P : cfg_.Q;
    Eigen::MatrixXd Rbar = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    for (int k = 0; k < N; ++k) Rbar.block<2, 2>(2 * k, 2 * k) = cfg_.R;
    Eigen::VectorXd xg(4 * N);
    for (int k = 0; k < N; ++k) xg.segment<4>(4 * k) << goal_.x(), goal_.y(), 0.0, 0.0;
    free_ = Sx_ * x0_.stacked() - xg;
    W_ = W;
    hessian_ = 2.0 * (Su_.transpose() * W * Su_ + Rbar);
    linear_ = 2.0 * Su_.transpose() * W * free_;
    constant_ = free_.dot(W * free_);
  }

  const RobotState & x0() const { return x0_; }
  const Vec2 & goal() const { return goal_; }
  const MpcConfig & config() const { return cfg_; }
  const std::vector<BarrierTrack> & barriers() const { return barriers_; }

  int num_decision() const { return 2 * cfg_.N; }
  int num_dynamics_equalities() const { return 4 * cfg_.N; }
  int num_box() const { return 4 * cfg_.N; }
  int num_speed() const { return cfg_.N; }
  int num_cbf() const { return static_cast<int>(barriers_.size()) * cfg_.Nh; }
  int num_constraints() const { return num_box() + num_speed() + num_cbf(); }

  const Barrier & barrier_at(std::size_t j, int k) const
  {
    const auto & track = barriers_[j];
    return track[std::min<std::size_t>(static_cast<std::size_t>(k), track.size() - 1)];
  }

  /// Stacked states x_1..x_N.
  Eigen::VectorXd states(const Eigen::VectorXd & U) const { return Sx_ * x0_.stacked() + Su_ * U; }

  double cost(const Eigen::VectorXd & U) const { return 0.5 * U.dot(hessian_ * U) + linear_.dot(U) + constant_; }
  Eigen::VectorXd cost_gradient(const Eigen::VectorXd & U) const { return hessian_ * U + linear_; }
  const Eigen::MatrixXd & cost_hessian() const { return hessian_; }

  /// Constraint values c(U) >= 0 in the documented row order; fills @p J when given.
  Eigen::VectorXd constraints(const Eigen::VectorXd & U, Eigen::MatrixXd * J = nullptr) const
  {
    const int N = cfg_.N, n = num_decision();
    const Eigen::VectorXd X = states(U);
    Eigen::VectorXd c(num_constraints());
    if (J) J->setZero(num_constraints(), n);
    int row = 0;
    for (int i = 0; i < n; ++i, ++row) {
      c[row] = cfg_.u_max - U[i];
      if (J) (*J)(row, i) = -1.0;
    }
    for (int i = 0; i < n; ++i, ++row) {
      c[row] = U[i] + cfg_.u_max;
      if (J) (*J)(row, i) = 1.0;
    }
    for (int k = 1; k <= N; ++k, ++row) {
      const Vec2 v = X.segment<2>(4 * (k - 1) + 2);
      c[row] = cfg_.v_max * cfg_.v_max - v.squaredNorm();
      if (J) J->row(row) = -2.0 * v.transpose() * Su_.block(4 * (k - 1) + 2, 0, 2, n);
    }
    auto pos = [&](int k) -> Vec2 { return k == 0 ? x0_.position : Vec2(X.segment<2>(4 * (k - 1))); };
    for (std::size_t j = 0; j < barriers_.size(); ++j) {
      for (int k = 0; k < cfg_.Nh; ++k, ++row) {
        const Barrier & now = barrier_at(j, k);
        const Barrier & next = barrier_at(j, k + 1);
        const Vec2 p0 = pos(k), p1 = pos(k + 1);
        c[row] = barrier_value(p1, next) - (1.0 - cfg_.gamma) * barrier_value(p0, now);
        if (J) {
          J->row(row) = barrier_gradient(p1, next).transpose() * Su_.block(4 * k, 0, 2, n);
          if (k > 0) J->row(row) -= (1.0 - cfg_.gamma) * barrier_gradient(p0, now).transpose() * Su_.block(4 * (k - 1), 0, 2, n);
        }
      }
    }
    return c;
  }

  /// Velocity rows of Su for step k (1-based), used for the speed-row curvature.
  Eigen::MatrixXd velocity_map(int k) const { return Su_.block(4 * (k - 1) + 2, 0, 2, num_decision()); }

private:
  RobotState x0_;
  Vec2 goal_;
  std::vector<BarrierTrack> barriers_;
  MpcConfig cfg_;
  Eigen::MatrixXd Sx_, Su_, W_, hessian_;
  Eigen::VectorXd free_, linear_;
  double constant_{0.0};
};

inline Ocp build_ocp(const RobotState & x0, const Vec2 & goal, std::vector<BarrierTrack> barriers, const MpcConfig & cfg)
{
  return Ocp(x0, goal, std::move(barriers), cfg);
}

struct OcpSolution
{
  std::vector<ControlInput> controls;  ///< u_0..u_{N-1}
  std::vector<RobotState> states;      ///< x_1..x_N
  SolverStatus status{SolverStatus::infeasible};
  Eigen::VectorXd multipliers;  ///< one per constraint row
  Eigen::VectorXd constraint_values;
  double max_violation{0.0};
  double stationarity{0.0};  ///< solver's own |grad f - J^T lambda|_inf
  double cost{0.0};
  int iterations{0};
  double solve_ms{0.0};

  Eigen::VectorXd stacked_controls() const
  {
    Eigen::VectorXd U(2 * controls.size());
    for (std::size_t k = 0; k < controls.size(); ++k) U.segment<2>(2 * static_cast<Eigen::Index>(k)) = controls[k].accel;
    return U;
  }
};

struct SqpOptions
{
  int max_iterations{100};
  double step_tolerance{1e-9};  ///< stop when the QP step is this small
  double feasibility_tolerance{1e-8};
  double kkt_tolerance{1e-7};
  double elastic_penalty{1e4};
};

/**
 * @brief Solve @p ocp from the optional @p warm_start controls.
 *
 * Returns optimal when the step and the KKT residual vanish with constraints
 * satisfied, feasible_suboptimal when the iteration cap is hit on a feasible
 * iterate and infeasible (with the least-violating iterate) otherwise.
 */
inline OcpSolution solve_ocp(const Ocp & ocp, const std::optional<Eigen::VectorXd> & warm_start = std::nullopt,
                             const SqpOptions & opt = {})
{
  const auto t_start = std::chrono::steady_clock::now();
  const MpcConfig & cfg = ocp.config();
  const int n = ocp.num_decision();
  const int nbox = ocp.num_box();
  const int nl = ocp.num_speed() + ocp.num_cbf();
  const int m = ocp.num_constraints();

  Eigen::VectorXd U = Eigen::VectorXd::Zero(n);
  if (warm_start && warm_start->size() == n) U = warm_start->cwiseMax(-cfg.u_max).cwiseMin(cfg.u_max);

  auto violation = [&](const Eigen::VectorXd & c) { return (-c.tail(nl)).cwiseMax(0.0).sum(); };
  auto merit = [&](const Eigen::VectorXd & V, double rho) { return ocp.cost(V) + rho * violation(ocp.constraints(V)); };

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd speed_mult = Eigen::VectorXd::Zero(ocp.num_speed());
  double rho = 10.0;
  bool converged = false;
  int it = 0;
  Eigen::MatrixXd J;
  Eigen::VectorXd c;
  Eigen::VectorXd best_U = U;
  double best_violation = std::numeric_limits<double>::infinity();

  QpProblem plain, elastic;
  elastic.H = Eigen::MatrixXd::Zero(n + nl, n + nl);
  elastic.g = Eigen::VectorXd::Zero(n + nl);
  elastic.C = Eigen::MatrixXd::Zero(m + nl, n + nl);
  elastic.d = Eigen::VectorXd::Zero(m + nl);

  for (; it < opt.max_iterations; ++it) {
    c = ocp.constraints(U, &J);
    if (!U.allFinite() || !c.allFinite()) break;
    const double viol = violation(c);
    if (viol < best_violation) {
      best_violation = viol;
      best_U = U;
    }
    const Eigen::VectorXd grad = ocp.cost_gradient(U);

    Eigen::MatrixXd Hl = ocp.cost_hessian();
    for (int k = 1; k <= ocp.num_speed(); ++k) {
      if (speed_mult[k - 1] > 0.0) {
        const Eigen::MatrixXd Sv = ocp.velocity_map(k);
        Hl.noalias() += 2.0 * speed_mult[k - 1] * Sv.transpose() * Sv;
      }
    }

    plain.H = Hl;
    plain.g = grad;
    plain.C = J;
    plain.d = -c;
    QpResult sub = solve_qp(plain);
    Eigen::VectorXd p;
    if (sub.ok()) {
      p = sub.x;
      lambda = sub.lambda;
    } else {
      // linearization infeasible: minimize the l1 violation with slacks s >= 0 on the
      // nonlinear rows (unit curvature on s keeps the subproblem strictly convex)
      elastic.H.topLeftCorner(n, n) = Hl;
      elastic.H.bottomRightCorner(nl, nl).setIdentity();
      elastic.g.head(n) = grad;
      elastic.g.tail(nl).setConstant(opt.elastic_penalty);
      elastic.C.topLeftCorner(m, n) = J;
      elastic.C.block(nbox, n, nl, nl).setIdentity();
      elastic.C.bottomRightCorner(nl, nl).setIdentity();
      elastic.d.head(m) = -c;
      sub = solve_qp(elastic);
      if (!sub.ok()) break;
      p = sub.x.head(n);
      lambda = sub.lambda.head(m);
    }
    speed_mult = lambda.segment(nbox, ocp.num_speed());

    if (p.lpNorm<Eigen::Infinity>() <= opt.step_tolerance * (1.0 + U.lpNorm<Eigen::Infinity>())) {
      U += p;
      converged = true;
      break;
    }

    rho = std::max(rho, 1.1 * lambda.tail(nl).lpNorm<Eigen::Infinity>() + 1.0);
    const Eigen::VectorXd lin = c.tail(nl) + J.bottomRows(nl) * p;
    const double pred = -(grad.dot(p) + 0.5 * p.dot(Hl * p)) + rho * (viol - (-lin).cwiseMax(0.0).sum());
    const double phi0 = merit(U, rho);
    double alpha = 1.0;
    while (alpha > 1e-10 && !(merit(U + alpha * p, rho) <= phi0 - 1e-4 * alpha * std::max(pred, 0.0))) alpha *= 0.5;
    if (alpha <= 1e-10) {
      // merit noise near the solution; accept a full step only if it is tiny
      if (p.lpNorm<Eigen::Infinity>() > 1e-7) break;
      alpha = 1.0;
    }
    U += alpha * p;
  }
  if (!U.allFinite() || (!converged && best_violation > opt.feasibility_tolerance)) U = best_U;

  OcpSolution sol;
  c = ocp.constraints(U, &J);
  const Eigen::VectorXd X = ocp.states(U);
  for (int k = 0; k < cfg.N; ++k) {
    sol.controls.push_back({U.segment<2>(2 * k)});
    sol.states.push_back(RobotState::from_stacked(X.segment<4>(4 * k)));
  }
  sol.multipliers = lambda;
  sol.constraint_values = c;
  sol.max_violation = std::max(0.0, -c.minCoeff());
  sol.stationarity = (ocp.cost_gradient(U) - J.transpose() * lambda).lpNorm<Eigen::Infinity>();
  sol.cost = ocp.cost(U);
  sol.iterations = it + 1;
  if (!c.allFinite() || !(sol.max_violation <= opt.feasibility_tolerance)) {
    sol.status = SolverStatus::infeasible;
  } else if (converged && sol.stationarity <= opt.kkt_tolerance) {
    sol.status = SolverStatus::optimal;
  } else {
    sol.status = SolverStatus::feasible_suboptimal;
  }
  sol.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  return sol;
}

struct BarrierSettings
{
  double robot_radius{0.5};
  double margin{0.05};
};

/**
 * @brief Per-step barriers for people (predicted zones) and walls (static).
 *
 * People come first, in input order, followed by walls.
 */
inline std::vector<BarrierTrack> make_barriers(std::span<const HumanState> humans, std::span<const Segment> walls,
                                               const ZoneModel & model, double zone_query_speed, int steps,
                                               double dt, const BarrierSettings & bs)
{
  std::vector<BarrierTrack> out;
  for (const auto & h : humans) {
    BarrierTrack track;
    for (int k = 0; k <= steps; ++k) {
      track.emplace_back(zone_at(predict_human(h, k, dt), model, zone_query_speed).world, bs.robot_radius, bs.margin);
    }
    out.push_back(std::move(track));
  }
  for (const auto & w : walls) out.push_back({Barrier(w, bs.robot_radius, bs.margin)});
  return out;
}

struct ControlStep
{
  ControlInput u;
  OcpSolution solution;
  bool fallback{false};
};

/// Stateful wrapper holding the warm start between receding-horizon steps.
class MpcCbfController
{
public:
  MpcCbfController(MpcConfig cfg, BarrierSettings barrier = {}, double zone_query_speed = 1.1, SqpOptions sqp = {})
      : cfg_(std::move(cfg)), barrier_(barrier), query_speed_(zone_query_speed), sqp_(sqp)
  {
    cfg_.validate();
  }

  const MpcConfig & config() const { return cfg_; }
  const BarrierSettings & barrier_settings() const { return barrier_; }
  double zone_query_speed() const { return query_speed_; }
  void reset() { warm_.reset(); }

  ControlStep control_step(const RobotState & x0, const Vec2 & goal, std::span<const HumanState> humans,
                           std::span<const Segment> walls, const ZoneModel & model)
  {
    auto barriers = make_barriers(humans, walls, model, query_speed_, cfg_.Nh, cfg_.dt, barrier_);
    const Ocp ocp(x0, goal, std::move(barriers), cfg_);
    ControlStep out;
    out.solution = solve_ocp(ocp, warm_, sqp_);
    const Eigen::VectorXd U = out.solution.stacked_controls();
    if (out.solution.status == SolverStatus::infeasible) {
      out.fallback = true;
      out.u = braking_control(x0);
      warm_.reset();
    } else {
      out.u = out.solution.controls.front();
      Eigen::VectorXd shifted(U.size());
      shifted.head(U.size() - 2) = U.tail(U.size() - 2);
      shifted.tail(2) = U.tail(2);
      warm_ = shifted;
    }
    return out;
  }

  /// Strongest deceleration toward rest that fits the input box.
  ControlInput braking_control(const RobotState & x0) const
  {
    Vec2 u = -x0.velocity / cfg_.dt;
    const double worst = u.cwiseAbs().maxCoeff();
    if (worst > cfg_.u_max) u *= cfg_.u_max / worst;
    return {u};
  }

private:
  MpcConfig cfg_;
  BarrierSettings barrier_;
  double query_speed_;
  SqpOptions sqp_;
  std::optional<Eigen::VectorXd> warm_;
};

}  // namespace socialzone

#endif  // SOCIALZONE_CONTROLLER_HPP
