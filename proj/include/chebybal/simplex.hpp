#pragma once

#include <Eigen/Dense>

namespace chebybal::oracle {

// min c'x subject to A_ub x <= b_ub, A_eq x = b_eq, x free.
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd A_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
};

enum class LpVerdict { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpVerdict verdict = LpVerdict::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

// Two-phase dense tableau simplex with Bland's rule. Deliberately shares no
// machinery with the active-set solver so agreement between the two is
// evidence rather than tautology.
LpResult solveSimplex(const LpProblem & prob);

} // namespace chebybal::oracle
