#ifndef SOCIALZONE_QP_HPP
#define SOCIALZONE_QP_HPP

/**
 * @file
 * @brief Dense strictly convex QP solver (Goldfarb-Idnani dual active set).
 *
 *   minimize    1/2 x^T H x + g^T x
 *   subject to  C x >= d
 *
 * H must be symmetric positive definite. The method starts from the
 * unconstrained minimizer and adds violated constraints one at a time while
 * keeping the iterate dual feasible, so an infeasible problem is detected when a
 * violated row cannot be satisfied by any primal or dual step.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace socialzone {

struct QpProblem
{
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
};

struct QpOptions
{
  double feasibility_tolerance{1e-13};  ///< relative to the row's scale
  int max_iterations{0};                ///< 0 selects 10 * (n + m) + 10
};

enum class QpStatus { optimal, infeasible, not_positive_definite, iteration_limit };

struct QpResult
{
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;  ///< one multiplier per row of C, >= 0, zero for inactive rows
  QpStatus status{QpStatus::optimal};
  int iterations{0};
  std::vector<Eigen::Index> active;

  bool ok() const { return status == QpStatus::optimal; }
};

namespace detail {

// Keeps J = L^{-T} Q and upper triangular R with (J^T N)_{1..q} = R for the
// active normals N.
class GiState
{
public:
  explicit GiState(Eigen::MatrixXd Linv_t) : J_(std::move(Linv_t)), R_(Eigen::MatrixXd::Zero(J_.rows(), J_.rows())) {}

  Eigen::Index q() const { return q_; }

  void directions(const Eigen::VectorXd & np, Eigen::VectorXd & dvec, Eigen::VectorXd & z, Eigen::VectorXd & r) const
  {
    const Eigen::Index n = J_.rows();
    dvec = J_.transpose() * np;
    z = J_.rightCols(n - q_) * dvec.tail(n - q_);
    r = R_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(dvec.head(q_));
  }

  /// False when the normal behind @p dvec is dependent on the active ones.
  bool add(Eigen::VectorXd dvec)
  {
    const Eigen::Index n = J_.rows();
    if (q_ >= n) return false;
    for (Eigen::Index j = n - 1; j > q_; --j) {
      const double a = dvec[j - 1], b = dvec[j];
      if (b == 0.0) continue;
      const double h = std::hypot(a, b);
      const double c = a / h, s = b / h;
      dvec[j - 1] = h;
      dvec[j] = 0.0;
      rotate_columns(J_, j - 1, c, s);
    }
    const double scale = std::max(1.0, dvec.head(q_ + 1).lpNorm<Eigen::Infinity>());
    if (std::abs(dvec[q_]) <= 1e-13 * scale) return false;
    R_.col(q_).head(q_ + 1) = dvec.head(q_ + 1);
    ++q_;
    return true;
  }

  void remove(Eigen::Index l)
  {
    for (Eigen::Index k = l; k + 1 < q_; ++k) R_.col(k) = R_.col(k + 1);
    R_.col(q_ - 1).setZero();
    for (Eigen::Index j = l; j + 1 < q_; ++j) {
      const double a = R_(j, j), b = R_(j + 1, j);
      if (b == 0.0) continue;
      const double h = std::hypot(a, b);
      const double c = a / h, s = b / h;
      for (Eigen::Index k = j; k + 1 < q_; ++k) {
        const double t1 = R_(j, k), t2 = R_(j + 1, k);
        R_(j, k) = c * t1 + s * t2;
        R_(j + 1, k) = -s * t1 + c * t2;
      }
      rotate_columns(J_, j, c, s);
    }
    --q_;
  }

private:
  static void rotate_columns(Eigen::MatrixXd & M, Eigen::Index j, double c, double s)
  {
    for (Eigen::Index k = 0; k < M.rows(); ++k) {
      const double t1 = M(k, j), t2 = M(k, j + 1);
      M(k, j) = c * t1 + s * t2;
      M(k, j + 1) = -s * t1 + c * t2;
    }
  }

  Eigen::MatrixXd J_;
  Eigen::MatrixXd R_;
  Eigen::Index q_{0};
};

}  // namespace detail

inline QpResult solve_qp(const QpProblem & qp, const QpOptions & opt = {})
{
  const Eigen::Index n = qp.H.rows();
  const Eigen::Index m = qp.C.rows();
  QpResult res;
  res.lambda = Eigen::VectorXd::Zero(m);

  const Eigen::LLT<Eigen::MatrixXd> llt(qp.H);
  if (llt.info() != Eigen::Success) {
    res.status = QpStatus::not_positive_definite;
    res.x = Eigen::VectorXd::Zero(n);
    return res;
  }
  detail::GiState st(llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n)));
  Eigen::VectorXd x = llt.solve(-qp.g);

  std::vector<Eigen::Index> active;  // row of C per active slot
  std::vector<double> u;             // multiplier per active slot
  std::vector<char> is_active(static_cast<std::size_t>(m), 0);

  Eigen::VectorXd row_scale(m);
  for (Eigen::Index i = 0; i < m; ++i) row_scale[i] = 1.0 + std::abs(qp.d[i]) + qp.C.row(i).lpNorm<1>();

  const int max_it = opt.max_iterations > 0 ? opt.max_iterations : static_cast<int>(10 * (n + m) + 10);
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd dvec, z, r;
  int it = 0;

  auto finish = [&](QpStatus s) {
    res.status = s;
    res.x = x;
    res.iterations = it;
    for (std::size_t k = 0; k < active.size(); ++k) res.lambda[active[k]] = std::max(0.0, u[k]);
    res.active = active;
    return res;
  };

  for (;;) {
    // most violated inactive row, relative to its scale
    const double xs = 1.0 + x.lpNorm<Eigen::Infinity>();
    Eigen::Index p = -1;
    double worst = -opt.feasibility_tolerance;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (is_active[static_cast<std::size_t>(i)]) continue;
      const double s = (qp.C.row(i).dot(x) - qp.d[i]) / (row_scale[i] * xs);
      if (s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) return finish(QpStatus::optimal);

    const Eigen::VectorXd np = qp.C.row(p).transpose();
    double u_plus = 0.0;
    for (;;) {
      if (++it > max_it) return finish(QpStatus::iteration_limit);
      st.directions(np, dvec, z, r);
      const double slack = np.dot(x) - qp.d[p];

      double t1 = inf;
      Eigen::Index l = -1;
      for (Eigen::Index k = 0; k < st.q(); ++k) {
        const double uk = u[static_cast<std::size_t>(k)];
        if (r[k] > 0.0 && uk / r[k] < t1) {
          t1 = uk / r[k];
          l = k;
        }
      }
      const double zn = z.dot(np);
      const double t2 = zn > 1e-14 * np.squaredNorm() ? -slack / zn : inf;
      const double t = std::min(t1, t2);
      if (t == inf) return finish(QpStatus::infeasible);

      for (Eigen::Index k = 0; k < st.q(); ++k) u[static_cast<std::size_t>(k)] -= t * r[k];
      u_plus += t;
      if (t2 < inf) x += t * z;

      if (t2 <= t1) {
        if (!st.add(dvec)) return finish(QpStatus::infeasible);
        active.push_back(p);
        u.push_back(u_plus);
        is_active[static_cast<std::size_t>(p)] = 1;
        break;
      }
      is_active[static_cast<std::size_t>(active[static_cast<std::size_t>(l)])] = 0;
      active.erase(active.begin() + l);
      u.erase(u.begin() + l);
      st.remove(l);
    }
  }
}

}  // namespace socialzone

#endif  // SOCIALZONE_QP_HPP
