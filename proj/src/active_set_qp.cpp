#include "chebybal/active_set_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chebybal/errors.hpp"

namespace chebybal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Workspace {
  const QpProblem * prob = nullptr;
  const QpOptions * opts = nullptr;
  std::vector<int> eqRows; // independent equality rows
  bool hasP = false;
};

Eigen::VectorXd gradient(const Workspace & ws, const Eigen::VectorXd & x)
{
  if(ws.hasP)
  {
    return ws.prob->P * x + ws.prob->q;
  }
  return ws.prob->q;
}

double objective(const Workspace & ws, const Eigen::VectorXd & x)
{
  double v = ws.prob->q.dot(x);
  if(ws.hasP)
  {
    v += 0.5 * x.dot(ws.prob->P * x);
  }
  return v;
}

// Rows of the working set: independent equality rows first, then the active
// inequality rows in `active` order.
Eigen::MatrixXd workingMatrix(const Workspace & ws, const std::vector<int> & active)
{
  const int n = ws.prob->numVars();
  Eigen::MatrixXd M(ws.eqRows.size() + active.size(), n);
  int r = 0;
  for(int i : ws.eqRows)
  {
    M.row(r++) = ws.prob->A.row(i);
  }
  for(int j : active)
  {
    M.row(r++) = ws.prob->G.row(j);
  }
  return M;
}

struct Direction {
  Eigen::VectorXd p;
  bool isRay = false;     // zero-curvature descent direction (step to block)
  bool stationary = false;
};

Direction searchDirection(const Workspace & ws, const Eigen::VectorXd & x,
                          const std::vector<int> & active)
{
  const int n = ws.prob->numVars();
  Direction dir;
  dir.p = Eigen::VectorXd::Zero(n);

  Eigen::MatrixXd M = workingMatrix(ws, active);
  Eigen::MatrixXd Z;
  if(M.rows() == 0)
  {
    Z = Eigen::MatrixXd::Identity(n, n);
  }
  else
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M.transpose());
    const int rank = static_cast<int>(qr.rank());
    if(rank >= n)
    {
      dir.stationary = true;
      return dir;
    }
    Eigen::MatrixXd Q = qr.householderQ();
    Z = Q.rightCols(n - rank);
  }

  Eigen::VectorXd g = gradient(ws, x);
  Eigen::VectorXd gr = Z.transpose() * g;
  const double gScale = 1.0 + g.norm();

  if(!ws.hasP)
  {
    if(gr.norm() <= 1e-12 * gScale)
    {
      dir.stationary = true;
      return dir;
    }
    dir.p = -Z * gr.normalized();
    dir.isRay = true;
    return dir;
  }

  Eigen::MatrixXd Hr = Z.transpose() * ws.prob->P * Z;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Hr);
  const Eigen::VectorXd & ev = eig.eigenvalues();
  const Eigen::MatrixXd & V = eig.eigenvectors();
  const double evMax = std::max(0.0, ev.maxCoeff());
  const double curvTol = std::max(1e-12 * evMax, 1e-14);

  Eigen::VectorXd ghat = V.transpose() * gr;
  Eigen::VectorXd rayReduced = Eigen::VectorXd::Zero(gr.size());
  Eigen::VectorXd newtonReduced = Eigen::VectorXd::Zero(gr.size());
  for(int i = 0; i < ev.size(); ++i)
  {
    if(ev(i) <= curvTol)
    {
      rayReduced += ghat(i) * V.col(i);
    }
    else
    {
      newtonReduced += (ghat(i) / ev(i)) * V.col(i);
    }
  }

  if(rayReduced.norm() > 1e-11 * gScale)
  {
    dir.p = -Z * rayReduced.normalized();
    dir.isRay = true;
    return dir;
  }

  Eigen::VectorXd p = -Z * newtonReduced;
  if(p.norm() <= ws.opts->step_tol * (1.0 + x.norm()))
  {
    dir.stationary = true;
    return dir;
  }
  dir.p = p;
  return dir;
}

struct Blocking {
  int row = -1;
  double alpha = kInf;
};

Blocking findBlocking(const Workspace & ws, const Eigen::VectorXd & x,
                      const Eigen::VectorXd & p, const std::vector<int> & active)
{
  Blocking blk;
  const Eigen::MatrixXd & G = ws.prob->G;
  const Eigen::VectorXd & h = ws.prob->h;
  double bestDir = 0.0;
  for(int j = 0; j < G.rows(); ++j)
  {
    if(std::find(active.begin(), active.end(), j) != active.end())
    {
      continue;
    }
    double d = G.row(j).dot(p);
    double dirTol = 1e-13 * (1.0 + G.row(j).norm() * p.norm());
    if(d <= dirTol)
    {
      continue;
    }
    double slack = std::max(0.0, h(j) - G.row(j).dot(x));
    double alpha = slack / d;
    double normalized = d / (1.0 + G.row(j).norm());
    if(alpha < blk.alpha - 1e-14
       || (alpha < blk.alpha + 1e-14 && normalized > bestDir))
    {
      blk.alpha = alpha;
      blk.row = j;
      bestDir = normalized;
    }
  }
  return blk;
}

struct MultiplierCheck {
  bool optimal = false;
  int dropRow = -1; // index into `active`
  double stationarity = 0.0;
};

MultiplierCheck checkMultipliers(const Workspace & ws, const Eigen::VectorXd & x,
                                 const std::vector<int> & active)
{
  MultiplierCheck res;
  Eigen::VectorXd g = gradient(ws, x);
  Eigen::MatrixXd M = workingMatrix(ws, active);
  if(M.rows() == 0)
  {
    res.stationarity = g.lpNorm<Eigen::Infinity>();
    res.optimal = true;
    return res;
  }
  Eigen::VectorXd mu = M.transpose().colPivHouseholderQr().solve(-g);
  res.stationarity = (g + M.transpose() * mu).lpNorm<Eigen::Infinity>();

  const int nEq = static_cast<int>(ws.eqRows.size());
  double worst = -ws.opts->mult_tol * (1.0 + mu.lpNorm<Eigen::Infinity>());
  for(size_t k = 0; k < active.size(); ++k)
  {
    double lambda = mu(nEq + static_cast<int>(k));
    if(lambda < worst)
    {
      worst = lambda;
      res.dropRow = static_cast<int>(k);
    }
  }
  res.optimal = (res.dropRow < 0);
  return res;
}

// Primal active-set iterations from a feasible x. Equality rows stay in the
// working set throughout; blocking inequality rows are added one at a time
// (a blocking row is always independent of the current working set since it
// has a nonzero component along the step direction).
QpResult iterate(const Workspace & ws, Eigen::VectorXd x, std::vector<int> active,
                 int * changesBudget)
{
  QpResult res;
  while(true)
  {
    Direction dir = searchDirection(ws, x, active);
    if(dir.stationary)
    {
      MultiplierCheck mc = checkMultipliers(ws, x, active);
      res.stationarity_error = mc.stationarity;
      if(mc.optimal)
      {
        res.status = QpStatus::Optimal;
        break;
      }
      active.erase(active.begin() + mc.dropRow);
      if(--(*changesBudget) < 0)
      {
        res.status = QpStatus::MaxIter;
        break;
      }
      continue;
    }

    Blocking blk = findBlocking(ws, x, dir.p, active);
    double alpha;
    if(dir.isRay)
    {
      if(blk.row < 0)
      {
        res.status = QpStatus::Unbounded;
        break;
      }
      alpha = blk.alpha;
    }
    else
    {
      alpha = std::min(1.0, blk.alpha);
    }
    x += alpha * dir.p;
    if(blk.row >= 0 && alpha == blk.alpha)
    {
      active.insert(std::upper_bound(active.begin(), active.end(), blk.row), blk.row);
      if(--(*changesBudget) < 0)
      {
        res.status = QpStatus::MaxIter;
        break;
      }
    }
  }
  res.x = x;
  res.active = active;
  std::sort(res.active.begin(), res.active.end());
  return res;
}

void finishResult(const Workspace & ws, QpResult & res)
{
  const QpProblem & prob = *ws.prob;
  res.objective = objective(ws, res.x);
  double viol = 0.0;
  if(prob.A.rows() > 0)
  {
    viol = (prob.A * res.x - prob.b).lpNorm<Eigen::Infinity>();
  }
  if(prob.G.rows() > 0)
  {
    viol = std::max(viol, (prob.G * res.x - prob.h).maxCoeff());
  }
  res.max_violation = std::max(0.0, viol);

  double compl_err = 0.0;
  for(int j : res.active)
  {
    compl_err = std::max(compl_err, std::abs(prob.G.row(j).dot(res.x) - prob.h(j)));
  }
  res.complementarity_error = compl_err;
}

// Independent equality rows plus a consistency verdict for the rest.
bool reduceEqualities(const QpProblem & prob, Workspace & ws, Eigen::VectorXd & x0,
                      double feasTol)
{
  ws.eqRows.clear();
  if(prob.A.rows() == 0)
  {
    x0 = Eigen::VectorXd::Zero(prob.numVars());
    return true;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(prob.A);
  x0 = cod.solve(prob.b);
  double resid = (prob.A * x0 - prob.b).lpNorm<Eigen::Infinity>();
  if(resid > feasTol * (1.0 + prob.b.lpNorm<Eigen::Infinity>()))
  {
    return false;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(prob.A.transpose());
  const int rank = static_cast<int>(qr.rank());
  const auto & perm = qr.colsPermutation().indices();
  for(int i = 0; i < rank; ++i)
  {
    ws.eqRows.push_back(perm(i));
  }
  std::sort(ws.eqRows.begin(), ws.eqRows.end());
  return true;
}

// Phase-1 LP: min s subject to A x = b, G x - 1 s <= h, -s <= 0, started at
// the equality least-squares point with s covering the worst violation.
QpResult phase1(const ActiveSetQp & solver, const QpProblem & prob,
                const Eigen::VectorXd & x0, int * changesBudget)
{
  const int n = prob.numVars();
  QpProblem lp;
  lp.q = Eigen::VectorXd::Zero(n + 1);
  lp.q(n) = 1.0;
  lp.A.resize(prob.A.rows(), n + 1);
  if(prob.A.rows() > 0)
  {
    lp.A << prob.A, Eigen::VectorXd::Zero(prob.A.rows());
  }
  lp.b = prob.b;
  lp.G = Eigen::MatrixXd::Zero(prob.G.rows() + 1, n + 1);
  lp.G.topLeftCorner(prob.G.rows(), n) = prob.G;
  lp.G.col(n).head(prob.G.rows()).setConstant(-1.0);
  lp.G(prob.G.rows(), n) = -1.0;
  lp.h.resize(prob.G.rows() + 1);
  lp.h << prob.h, 0.0;

  double viol = 0.0;
  if(prob.G.rows() > 0)
  {
    viol = std::max(0.0, (prob.G * x0 - prob.h).maxCoeff());
  }
  Eigen::VectorXd z0(n + 1);
  z0 << x0, viol * (1.0 + 1e-9) + 1e-12;

  Workspace ws;
  ws.prob = &lp;
  ws.opts = &solver.options();
  ws.hasP = false;
  Eigen::VectorXd dummy;
  reduceEqualities(lp, ws, dummy, solver.options().feas_tol);
  return iterate(ws, z0, {}, changesBudget);
}

} // namespace

QpResult ActiveSetQp::solve(const QpProblem & prob) const
{
  return solveWarm(prob, Eigen::VectorXd(), {});
}

QpResult ActiveSetQp::solveWarm(const QpProblem & prob, const Eigen::VectorXd & x0,
                                const std::vector<int> & active0) const
{
  const int n = prob.numVars();
  if(prob.P.size() > 0 && (prob.P.rows() != n || prob.P.cols() != n))
  {
    throw Error("ActiveSetQp: P dimension mismatch");
  }
  if(prob.A.rows() != prob.b.size() || prob.G.rows() != prob.h.size()
     || (prob.A.rows() > 0 && prob.A.cols() != n) || (prob.G.rows() > 0 && prob.G.cols() != n))
  {
    throw Error("ActiveSetQp: constraint dimension mismatch");
  }

  Workspace ws;
  ws.prob = &prob;
  ws.opts = &opts_;
  ws.hasP = prob.P.size() > 0 && prob.P.lpNorm<Eigen::Infinity>() > 0.0;

  int changesBudget = opts_.max_active_set_changes;

  Eigen::VectorXd xeq;
  if(!reduceEqualities(prob, ws, xeq, opts_.feas_tol))
  {
    QpResult res;
    res.status = QpStatus::Infeasible;
    res.x = xeq;
    finishResult(ws, res);
    return res;
  }

  // Warm path: project the seed onto its active face and keep the set if
  // the result is feasible.
  if(x0.size() == n)
  {
    std::vector<int> seed;
    for(int j : active0)
    {
      if(j >= 0 && j < prob.G.rows())
      {
        seed.push_back(j);
      }
    }
    Eigen::MatrixXd M(ws.eqRows.size() + seed.size(), n);
    Eigen::VectorXd r(M.rows());
    int row = 0;
    for(int i : ws.eqRows)
    {
      M.row(row) = prob.A.row(i);
      r(row++) = prob.b(i);
    }
    for(int j : seed)
    {
      M.row(row) = prob.G.row(j);
      r(row++) = prob.h(j);
    }
    Eigen::VectorXd x = x0;
    if(M.rows() > 0)
    {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
      x = x0 + cod.solve(r - M * x0);
    }
    double eqErr = prob.A.rows() > 0 ? (prob.A * x - prob.b).lpNorm<Eigen::Infinity>() : 0.0;
    double ineqErr = prob.G.rows() > 0 ? (prob.G * x - prob.h).maxCoeff() : 0.0;
    double faceErr = 0.0;
    for(int j : seed)
    {
      faceErr = std::max(faceErr, std::abs(prob.G.row(j).dot(x) - prob.h(j)));
    }
    if(eqErr <= opts_.feas_tol && ineqErr <= opts_.feas_tol && faceErr <= opts_.feas_tol)
    {
      // Keep only rows that stay independent on top of the equalities.
      std::vector<int> filtered;
      for(int j : seed)
      {
        std::vector<int> trial = filtered;
        trial.push_back(j);
        Eigen::MatrixXd Mt = workingMatrix(ws, trial);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Mt.transpose());
        if(static_cast<int>(qr.rank()) == Mt.rows())
        {
          filtered = std::move(trial);
        }
      }
      QpResult res = iterate(ws, x, filtered, &changesBudget);
      res.warm_start_used = true;
      res.active_set_changes = opts_.max_active_set_changes - changesBudget;
      finishResult(ws, res);
      return res;
    }
  }

  // Cold path: phase-1 LP when the equality point violates inequalities.
  Eigen::VectorXd xfeas = xeq;
  double viol = prob.G.rows() > 0 ? (prob.G * xeq - prob.h).maxCoeff() : 0.0;
  if(viol > opts_.feas_tol)
  {
    QpResult p1 = phase1(*this, prob, xeq, &changesBudget);
    if(p1.status == QpStatus::MaxIter)
    {
      QpResult res;
      res.status = QpStatus::MaxIter;
      res.x = p1.x.head(n);
      res.active_set_changes = opts_.max_active_set_changes - changesBudget;
      finishResult(ws, res);
      return res;
    }
    double sStar = p1.x(n);
    if(p1.status != QpStatus::Optimal || sStar > opts_.feas_tol)
    {
      QpResult res;
      res.status = QpStatus::Infeasible;
      res.x = p1.x.head(n);
      res.active_set_changes = opts_.max_active_set_changes - changesBudget;
      finishResult(ws, res);
      res.objective = sStar; // attained minimum of the worst violation
      return res;
    }
    xfeas = p1.x.head(n);
  }

  QpResult res = iterate(ws, xfeas, {}, &changesBudget);
  res.active_set_changes = opts_.max_active_set_changes - changesBudget;
  finishResult(ws, res);
  return res;
}

} // namespace chebybal
