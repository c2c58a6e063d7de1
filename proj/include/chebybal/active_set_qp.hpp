#pragma once

#include <Eigen/Dense>

#include <vector>

namespace chebybal {

// min 1/2 x'Px + q'x  subject to  A x = b,  G x <= h.
// P must be symmetric PSD; an empty or zero P turns the problem into an LP.
struct QpProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;

  int numVars() const { return static_cast<int>(q.size()); }
};

enum class QpStatus { Optimal, Infeasible, Unbounded, MaxIter };

struct QpResult {
  QpStatus status = QpStatus::MaxIter;
  Eigen::VectorXd x;
  double objective = 0.0;
  std::vector<int> active;      // final working set, ascending G row indices
  int active_set_changes = 0;
  bool warm_start_used = false; // false when a warm request fell back to cold
  double stationarity_error = 0.0;
  double complementarity_error = 0.0;
  double max_violation = 0.0;
};

struct QpOptions {
  int max_active_set_changes = 200;
  double feas_tol = 1e-8;  // absolute violation deciding Infeasible
  double mult_tol = 1e-9;  // dual feasibility slack
  double step_tol = 1e-12; // relative stationary-step threshold
};

// Dense primal active-set solver. Feasibility is established by a phase-1
// LP over the same constraints (extra slack variable), run through the same
// iteration core with a zero Hessian. Null spaces come from QR of the
// working-set matrix; the reduced Hessian is eigen-decomposed so that
// zero-curvature (LP) directions and strictly convex directions coexist.
class ActiveSetQp {
public:
  explicit ActiveSetQp(QpOptions opts = {}) : opts_(opts) {}

  QpResult solve(const QpProblem & prob) const;

  // Seeds the iteration from a previous solution of a structurally
  // identical problem. Falls back to a cold solve (warm_start_used =
  // false) when the seed cannot be made feasible on its active face.
  QpResult solveWarm(const QpProblem & prob, const Eigen::VectorXd & x0,
                     const std::vector<int> & active0) const;

  const QpOptions & options() const { return opts_; }

private:
  QpOptions opts_;
};

} // namespace chebybal
