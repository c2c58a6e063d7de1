#include "chebybal/cheby_qp.hpp"

#include <chrono>
#include <functional>
#include <limits>

namespace chebybal {

Eigen::VectorXd UnitScaling::columnScales(int numActiveContacts) const
{
  Eigen::VectorXd m(3 + 6 * numActiveContacts);
  m.head<3>().setConstant(length);
  for(int k = 0; k < numActiveContacts; ++k)
  {
    m.segment<3>(3 + 6 * k).setConstant(force);
    m.segment<3>(6 + 6 * k).setConstant(torque);
  }
  return m;
}

Eigen::VectorXd ChebyWeights::diagonal(int numActiveContacts) const
{
  Eigen::VectorXd w(3 + 6 * numActiveContacts);
  w.head<3>().setConstant(com);
  w.tail(6 * numActiveContacts).setConstant(wrench);
  return w;
}

ChebyWeights ChebyWeights::zero()
{
  return ChebyWeights{0.0, 0.0, 0.0};
}

ChebyTargets ChebyTargets::fromWeights(const ConstraintBlocks & blocks, const ChebyWeights & w,
                                       const Vec3 & com_target)
{
  ChebyTargets t;
  t.y_des = Eigen::VectorXd::Zero(blocks.numVars());
  t.y_des.head<3>() = com_target;
  t.weights = w.diagonal(blocks.num_active);
  return t;
}

ChebyProblem augment(const ConstraintBlocks & blocks, const ChebyTargets & targets,
                     const UnitScaling & scaling)
{
  const int nY = blocks.numVars();
  if(targets.y_des.size() != nY || targets.weights.size() != nY)
  {
    throw Error("augment: target dimension does not match blocks");
  }
  if(targets.weights.minCoeff() < 0.0)
  {
    throw Error("augment: weights must be nonnegative");
  }

  ChebyProblem p;
  p.contact_ids = blocks.contact_ids;
  p.row_labels = blocks.row_labels;
  p.eq_labels = blocks.eq_labels;
  p.num_active = blocks.num_active;
  p.num_sliding = blocks.num_sliding;
  p.column_scale = scaling.columnScales(blocks.num_active);

  const int m = static_cast<int>(blocks.G_ineq.rows());
  const int nX = nY + 1;

  // Column scaling: Y = diag(scale) * Yhat; constraints absorb the scale.
  Eigen::MatrixXd Gs = blocks.G_ineq * p.column_scale.asDiagonal();
  Eigen::MatrixXd As = blocks.A_eq * p.column_scale.asDiagonal();

  p.xi.resize(m);
  for(int j = 0; j < m; ++j)
  {
    p.xi(j) = Gs.row(j).norm();
  }

  p.A_star = Eigen::MatrixXd::Zero(As.rows(), nX);
  p.A_star.leftCols(nY) = As;
  p.b_eq = blocks.b_eq;

  p.G_star = Eigen::MatrixXd::Zero(m + 1, nX);
  p.G_star.topLeftCorner(m, nY) = Gs;
  p.G_star.col(nY).head(m) = p.xi;
  p.G_star(m, nY) = -1.0; // r >= 0
  p.h_star.resize(m + 1);
  p.h_star << blocks.h_ineq, 0.0;
  p.row_labels.push_back("cheby:r>=0");

  // Tracking objective in scaled coordinates: weight w on (Y - Y_des)^2
  // becomes w * scale^2 on (Yhat - Yhat_des)^2.
  Eigen::VectorXd pdiag = Eigen::VectorXd::Zero(nX);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(nX);
  double minTracked = std::numeric_limits<double>::infinity();
  for(int i = 0; i < nY; ++i)
  {
    double wi = targets.weights(i) * p.column_scale(i) * p.column_scale(i);
    pdiag(i) = 2.0 * wi;
    q(i) = -2.0 * wi * (targets.y_des(i) / p.column_scale(i));
    if(wi > 0.0)
    {
      minTracked = std::min(minTracked, wi);
    }
  }
  if(std::isfinite(minTracked))
  {
    p.radius_weight = 1e-6 * minTracked;
    pdiag(nY) = 2.0 * p.radius_weight;
  }
  q(nY) = -1.0;

  p.P = pdiag.asDiagonal();
  if(pdiag.maxCoeff() == 0.0)
  {
    p.P.resize(0, 0); // pure Chebyshev LP
  }
  p.q = q;

  std::string layout;
  for(const auto & id : p.contact_ids) { layout += id + "|"; }
  for(const auto & lbl : p.row_labels) { layout += lbl + ";"; }
  for(const auto & lbl : p.eq_labels) { layout += lbl + ";"; }
  p.structure_key = std::hash<std::string>{}(layout);
  return p;
}

WrenchRange wrenchRange(const ChebySolution & sol, int contactCount)
{
  if(sol.status != SolveStatus::Optimal)
  {
    throw Error("wrenchRange: solution is not Optimal");
  }
  return WrenchRange{static_cast<double>(contactCount) * sol.radius, contactCount};
}

const Wrench & ChebySolution::wrenchOf(const std::string & id) const
{
  for(size_t k = 0; k < contact_ids.size(); ++k)
  {
    if(contact_ids[k] == id)
    {
      return wrenches[k];
    }
  }
  throw Error("no wrench for contact '" + id + "'");
}

namespace {

QpProblem toQp(const ChebyProblem & p)
{
  QpProblem qp;
  qp.P = p.P;
  qp.q = p.q;
  qp.A = p.A_star;
  qp.b = p.b_eq;
  qp.G = p.G_star;
  qp.h = p.h_star;
  return qp;
}

SolveStatus mapStatus(QpStatus s)
{
  switch(s)
  {
    case QpStatus::Optimal: return SolveStatus::Optimal;
    case QpStatus::Infeasible: return SolveStatus::Infeasible;
    case QpStatus::Unbounded: return SolveStatus::Unbounded;
    default: return SolveStatus::MaxIter;
  }
}

} // namespace

ChebySolution ChebySolver::finish(const ChebyProblem & problem, const QpResult & qp,
                                  double seconds) const
{
  ChebySolution sol;
  sol.status = mapStatus(qp.status);
  sol.contact_ids = problem.contact_ids;
  sol.x_scaled = qp.x;
  sol.active_set = qp.active;
  sol.iterations = qp.active_set_changes;
  sol.objective = qp.objective;
  sol.solve_time = seconds;
  sol.max_violation = qp.max_violation;
  sol.stationarity_error = qp.stationarity_error;
  sol.structure_key = problem.structure_key;

  const int nY = problem.numY();
  if(qp.x.size() == nY + 1)
  {
    Eigen::VectorXd y = problem.column_scale.asDiagonal() * qp.x.head(nY);
    sol.com = y.head<3>();
    for(int k = 0; k < problem.num_active; ++k)
    {
      Wrench w;
      w.force = y.segment<3>(3 + 6 * k);
      w.torque = y.segment<3>(6 + 6 * k);
      w.frame = Frame::world();
      sol.wrenches.push_back(w);
    }
    sol.radius = qp.x(nY);
  }
  return sol;
}

ChebySolution ChebySolver::solve(const ChebyProblem & problem) const
{
  auto t0 = std::chrono::steady_clock::now();
  QpResult res = qp_.solve(toQp(problem));
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return finish(problem, res, seconds);
}

ChebySolution ChebySolver::solve(const ChebyProblem & problem, const ChebySolution & previous) const
{
  bool sameStructure = previous.x_scaled.size() == problem.numY() + 1
                       && previous.structure_key == problem.structure_key;
  auto t0 = std::chrono::steady_clock::now();
  QpResult res;
  if(sameStructure)
  {
    res = qp_.solveWarm(toQp(problem), previous.x_scaled, previous.active_set);
  }
  else
  {
    res = qp_.solve(toQp(problem));
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ChebySolution sol = finish(problem, res, seconds);
  sol.cold_start_fallback = !sameStructure || !res.warm_start_used;
  return sol;
}

} // namespace chebybal
