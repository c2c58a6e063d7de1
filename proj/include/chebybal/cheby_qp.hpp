#pragma once

#include <string>
#include <vector>

#include "chebybal/active_set_qp.hpp"
#include "chebybal/contacts.hpp"

namespace chebybal {

// Characteristic magnitudes dividing each decision column before the row
// norms xi are taken; one inscribed ball spans CoM (m) and wrench (N, N.m)
// coordinates, so the ball geometry depends on this choice.
struct UnitScaling {
  double force = 100.0;  // N
  double torque = 10.0;  // N.m
  double length = 1.0;   // m

  Eigen::VectorXd columnScales(int numActiveContacts) const;
};

// Diagonal tracking weights. A zero weight drops the variable from the
// objective; all-zero weights reduce the QP to the pure Chebyshev LP.
struct ChebyWeights {
  double com = 1.0;
  double wrench = 1e-3;
  double radius_factor = 1e-6; // radius weight = factor * min nonzero weight

  Eigen::VectorXd diagonal(int numActiveContacts) const;
  static ChebyWeights zero();
};

struct ChebyTargets {
  Eigen::VectorXd y_des;   // 3 + 6l, physical units
  Eigen::VectorXd weights; // 3 + 6l, diagonal of the tracking matrix, >= 0

  static ChebyTargets fromWeights(const ConstraintBlocks & blocks, const ChebyWeights & w,
                                  const Vec3 & com_target);
};

// Chebyshev-augmented QP over X = [Y r] in column-scaled coordinates.
struct ChebyProblem {
  Eigen::MatrixXd A_star; // (6 + 3s) x (4 + 6l), last column zero
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd G_star; // (m + 1) x (4 + 6l); last column xi, then -1
  Eigen::VectorXd h_star; // ends in 0 (the r >= 0 row)
  Eigen::MatrixXd P;      // diagonal PSD, (4 + 6l)^2
  Eigen::VectorXd q;
  Eigen::VectorXd xi;     // row norms of the scaled G over the Y columns

  Eigen::VectorXd column_scale; // length 3 + 6l (radius column unscaled)
  double radius_weight = 0.0;
  std::vector<std::string> row_labels;
  std::vector<std::string> eq_labels;
  std::vector<std::string> contact_ids;
  int num_active = 0;
  int num_sliding = 0;
  size_t structure_key = 0; // hash over contacts, modes and row layout

  int numY() const { return 3 + 6 * num_active; }
  int numIneq() const { return static_cast<int>(xi.size()); }
  // Scaled constraint data without the radius column/row, the
  // H-representation the inscribed ball lives in.
  Eigen::MatrixXd scaledG() const { return G_star.topLeftCorner(numIneq(), numY()); }
  Eigen::VectorXd scaledH() const { return h_star.head(numIneq()); }
  Eigen::MatrixXd scaledA() const { return A_star.leftCols(numY()); }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

struct ChebySolution {
  SolveStatus status = SolveStatus::MaxIter;
  Vec3 com = Vec3::Zero();
  std::vector<Wrench> wrenches; // world frame about each contact point
  std::vector<std::string> contact_ids;
  double radius = 0.0;    // in scaled decision coordinates
  double objective = 0.0;
  double solve_time = 0.0; // seconds
  Eigen::VectorXd x_scaled; // [Y^ r]
  std::vector<int> active_set;
  int iterations = 0;
  bool cold_start_fallback = false; // warm requested but structure mismatched
  double max_violation = 0.0;
  double stationarity_error = 0.0;
  size_t structure_key = 0;

  const Wrench & wrenchOf(const std::string & id) const;
};

struct WrenchRange {
  double r_w = 0.0;
  int contact_count = 0;
};

// Builds X = [Y r], A* = [A 0], G* = [G xi; 0 -1], h* = [h 0], P = 2Q and
// q = -2 Q X_des - e_r, in scaled coordinates.
ChebyProblem augment(const ConstraintBlocks & blocks, const ChebyTargets & targets,
                     const UnitScaling & scaling = {});

// r_w = l * r, the radius valid for the summed contact wrench.
WrenchRange wrenchRange(const ChebySolution & sol, int contactCount);

class ChebySolver {
public:
  explicit ChebySolver(QpOptions opts = {}) : qp_(opts) {}

  ChebySolution solve(const ChebyProblem & problem) const;

  // Warm start from a previous solution; requires identical structure
  // (same contacts and modes), otherwise falls back to a cold solve and
  // flags it on the returned solution.
  ChebySolution solve(const ChebyProblem & problem, const ChebySolution & previous) const;

private:
  ChebySolution finish(const ChebyProblem & problem, const QpResult & qp, double seconds) const;

  ActiveSetQp qp_;
};

} // namespace chebybal
