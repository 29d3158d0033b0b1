#include "pmugame/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pmugame {

LpSolution solve_canonical_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c, std::size_t max_pivots) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("LP dimension mismatch");
  if (m > 0 && b.minCoeff() < 0.0) throw std::invalid_argument("LP right-hand side must be >= 0");

  // Columns: n structural, m slack, then the right-hand side.
  const Eigen::Index width = n + m + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, width);
  t.topLeftCorner(m, n) = a;
  t.block(0, n, m, m).setIdentity();
  t.col(width - 1).head(m) = b;
  t.row(m).head(n) = -c.transpose();

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()});
  const double eps = 1e-12 * scale;

  LpSolution sol;
  while (true) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (t(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      sol.status = LpStatus::Optimal;
      break;
    }

    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double pivot = t(i, enter);
      if (pivot <= eps) continue;
      const double ratio = t(i, width - 1) / pivot;
      const bool better = ratio < best_ratio - eps;
      const bool tie = !better && ratio <= best_ratio + eps;
      if (better || (tie && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        best_ratio = std::min(ratio, best_ratio);
        leave = i;
      }
    }
    if (leave < 0) {
      sol.status = LpStatus::Unbounded;
      break;
    }
    if (sol.pivots >= max_pivots) {
      sol.status = LpStatus::IterationLimit;
      break;
    }

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
    ++sol.pivots;
  }

  sol.primal = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index var = basis[static_cast<std::size_t>(i)];
    if (var < n) sol.primal(var) = t(i, width - 1);
  }
  sol.dual = t.row(m).segment(n, m).transpose();
  sol.objective = t(m, width - 1);
  return sol;
}

}  // namespace pmugame
