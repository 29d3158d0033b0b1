#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace pmugame {

enum class LpStatus { Optimal, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  Eigen::VectorXd primal;  // x
  Eigen::VectorXd dual;    // y, one per constraint row
  std::size_t pivots = 0;
};

/// Dense tableau simplex for
///     max c'x  s.t.  A x <= b,  x >= 0,   with b >= 0.
/// The origin is feasible so no phase one is needed. Pivoting follows
/// Bland's rule, which cannot cycle on degenerate problems. The dual of the
/// returned basis solves  min b'y  s.t.  A'y >= c, y >= 0.
LpSolution solve_canonical_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c, std::size_t max_pivots = 100000);

}  // namespace pmugame
