#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "ricci/error.hpp"

namespace ricci::detail {

template <class Scalar>
struct LinearProgramSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar objective = 0;
};

/// maximize c.x  subject to  A x <= b,  x >= 0, with b >= 0 so the slack
/// basis is feasible. Dense tableau, Bland's rule. Small instances only.
template <class Scalar>
LinearProgramSolution<Scalar> maximize_feasible_origin(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index rows = A.rows();
  const Eigen::Index vars = A.cols();
  if ((b.array() < 0).any()) throw Error(ErrorCode::InvalidParams, "right-hand side must be non-negative");

  // Columns: [x (vars) | slack (rows) | rhs]; last row is the objective.
  Matrix t = Matrix::Zero(rows + 1, vars + rows + 1);
  t.topLeftCorner(rows, vars) = A;
  t.block(0, vars, rows, rows).setIdentity();
  t.topRightCorner(rows, 1) = b;
  t.bottomLeftCorner(1, vars) = -c.transpose();
  std::vector<Eigen::Index> basic(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) basic[static_cast<std::size_t>(r)] = vars + r;

  const Scalar tol = Scalar(1e-11);
  const Eigen::Index rhs = vars + rows;
  for (;;) {
    Eigen::Index entering = -1;
    for (Eigen::Index j = 0; j < vars + rows; ++j) {
      if (t(rows, j) < -tol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) break;

    Eigen::Index leave = -1;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Scalar a = t(r, entering);
      if (a <= tol) continue;
      const Scalar ratio = t(r, rhs) / a;
      if (ratio < best - tol ||
          (std::abs(ratio - best) <= tol && basic[static_cast<std::size_t>(r)] < basic[static_cast<std::size_t>(leave)])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave < 0) throw Error(ErrorCode::InvalidParams, "linear program is unbounded");

    t.row(leave) /= t(leave, entering);
    for (Eigen::Index r = 0; r <= rows; ++r) {
      if (r == leave) continue;
      const Scalar factor = t(r, entering);
      if (factor != Scalar(0)) t.row(r) -= factor * t.row(leave);
    }
    basic[static_cast<std::size_t>(leave)] = entering;
  }

  LinearProgramSolution<Scalar> out;
  out.x = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(vars);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index v = basic[static_cast<std::size_t>(r)];
    if (v < vars) out.x[v] = t(r, rhs);
  }
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace ricci::detail
