#include "chebybal/simplex.hpp"

#include <cmath>
#include <vector>

#include "chebybal/errors.hpp"

namespace chebybal::oracle {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kRatioTieTol = 1e-9;

// Standard-form tableau: rows = constraints with nonnegative rhs, columns =
// [x+ (n), x- (n), slack (one per inequality), artificial...]. All
// constraint rows are equilibrated to unit infinity norm first, so the
// absolute pivot tolerances are meaningful.
struct Tableau {
  Eigen::MatrixXd T;      // m x (cols + 1), last column is rhs
  std::vector<int> basis; // basic column per row
  int cols = 0;

  double & rhs(int r) { return T(r, cols); }

  void pivot(int row, int col)
  {
    T.row(row) /= T(row, col);
    for(int r = 0; r < T.rows(); ++r)
    {
      if(r == row) { continue; }
      double f = T(r, col);
      if(f != 0.0)
      {
        T.row(r) -= f * T.row(row);
      }
    }
    basis[row] = col;
  }
};

enum class PhaseOutcome { Optimal, Unbounded };

// Dantzig pricing with a stability-first ratio tie-break; switches to
// Bland's rule after a pivot budget so degenerate cycles cannot stall the
// solve. Throws only if both strategies exhaust a generous hard cap.
PhaseOutcome runSimplex(Tableau & tab, Eigen::RowVectorXd & z, const std::vector<bool> & allowed)
{
  const int m = static_cast<int>(tab.T.rows());
  const long blandAfter = 2000L + 20L * (m + tab.cols);
  const long hardCap = 100L * blandAfter;
  long pivots = 0;

  while(true)
  {
    if(++pivots > hardCap)
    {
      throw Error("solveSimplex: pivot cap exceeded");
    }
    bool bland = pivots > blandAfter;

    int enter = -1;
    double best = -kReducedCostTol;
    for(int c = 0; c < tab.cols; ++c)
    {
      if(!allowed[c] || z(c) >= -kReducedCostTol)
      {
        continue;
      }
      if(bland)
      {
        enter = c;
        break;
      }
      if(z(c) < best)
      {
        best = z(c);
        enter = c;
      }
    }
    if(enter < 0)
    {
      return PhaseOutcome::Optimal;
    }

    int leave = -1;
    double bestRatio = 0.0;
    for(int r = 0; r < m; ++r)
    {
      double a = tab.T(r, enter);
      if(a <= kPivotTol)
      {
        continue;
      }
      double ratio = tab.rhs(r) / a;
      if(leave < 0 || ratio < bestRatio - kRatioTieTol)
      {
        leave = r;
        bestRatio = ratio;
      }
      else if(ratio < bestRatio + kRatioTieTol)
      {
        bool better = bland ? tab.basis[r] < tab.basis[leave]
                            : a > tab.T(leave, enter);
        if(better)
        {
          leave = r;
          bestRatio = ratio;
        }
      }
    }
    if(leave < 0)
    {
      return PhaseOutcome::Unbounded;
    }
    double zf = z(enter);
    tab.pivot(leave, enter);
    z -= zf * tab.T.row(leave).head(tab.cols);
  }
}

} // namespace

LpResult solveSimplex(const LpProblem & prob)
{
  const int n = static_cast<int>(prob.c.size());
  const int mi = static_cast<int>(prob.A_ub.rows());
  const int me = static_cast<int>(prob.A_eq.rows());
  const int m = mi + me;
  if((mi > 0 && prob.A_ub.cols() != n) || (me > 0 && prob.A_eq.cols() != n))
  {
    throw Error("solveSimplex: dimension mismatch");
  }

  const int nSlack = mi;
  Tableau tab;
  tab.cols = 2 * n + nSlack + m;
  tab.T = Eigen::MatrixXd::Zero(m, tab.cols + 1);
  tab.basis.assign(m, -1);

  const int artBase = 2 * n + nSlack;
  int artUsed = 0;
  for(int r = 0; r < m; ++r)
  {
    Eigen::RowVectorXd a;
    double b;
    bool isEq = r >= mi;
    if(isEq)
    {
      a = prob.A_eq.row(r - mi);
      b = prob.b_eq(r - mi);
    }
    else
    {
      a = prob.A_ub.row(r);
      b = prob.b_ub(r);
    }
    // Row equilibration; slack/artificial columns keep unit coefficients.
    double rowScale = std::max(a.cwiseAbs().maxCoeff(), std::abs(b));
    if(rowScale > 0.0)
    {
      a /= rowScale;
      b /= rowScale;
    }
    double sign = (b < 0.0) ? -1.0 : 1.0;
    tab.T.row(r).head(n) = sign * a;
    tab.T.row(r).segment(n, n) = -sign * a;
    tab.rhs(r) = sign * b;
    if(!isEq)
    {
      tab.T(r, 2 * n + r) = sign;
    }
    if(!isEq && sign > 0.0)
    {
      tab.basis[r] = 2 * n + r;
    }
    else
    {
      int art = artBase + artUsed++;
      tab.T(r, art) = 1.0;
      tab.basis[r] = art;
    }
  }

  // Phase 1: minimize the sum of artificials.
  std::vector<bool> allowAll(tab.cols, true);
  Eigen::RowVectorXd z1 = Eigen::RowVectorXd::Zero(tab.cols);
  for(int c = artBase; c < tab.cols; ++c)
  {
    z1(c) = 1.0;
  }
  for(int r = 0; r < m; ++r)
  {
    if(tab.basis[r] >= artBase)
    {
      z1 -= tab.T.row(r).head(tab.cols);
    }
  }
  runSimplex(tab, z1, allowAll);
  double artSum = 0.0;
  for(int r = 0; r < m; ++r)
  {
    if(tab.basis[r] >= artBase)
    {
      artSum += tab.rhs(r);
    }
  }
  if(artSum > 1e-8)
  {
    return {LpVerdict::Infeasible, Eigen::VectorXd(), 0.0};
  }

  // Drive leftover artificials out of the basis on the stablest pivot; a
  // row with no usable pivot is redundant and gets neutralized.
  for(int r = 0; r < m; ++r)
  {
    if(tab.basis[r] < artBase)
    {
      continue;
    }
    int col = -1;
    double best = kPivotTol;
    for(int c = 0; c < artBase; ++c)
    {
      double a = std::abs(tab.T(r, c));
      if(a > best)
      {
        best = a;
        col = c;
      }
    }
    if(col >= 0)
    {
      tab.pivot(r, col);
    }
    else
    {
      tab.T.row(r).setZero();
      tab.rhs(r) = 0.0;
    }
  }

  // Phase 2 with artificial columns locked out.
  std::vector<bool> allowPhase2(tab.cols, true);
  for(int c = artBase; c < tab.cols; ++c)
  {
    allowPhase2[c] = false;
  }
  double objScale = std::max(1.0, prob.c.cwiseAbs().maxCoeff());
  Eigen::RowVectorXd z2 = Eigen::RowVectorXd::Zero(tab.cols);
  z2.head(n) = prob.c.transpose() / objScale;
  z2.segment(n, n) = -prob.c.transpose() / objScale;
  for(int r = 0; r < m; ++r)
  {
    int bc = tab.basis[r];
    if(bc >= 0 && bc < tab.cols && z2(bc) != 0.0)
    {
      z2 -= z2(bc) * tab.T.row(r).head(tab.cols);
    }
  }
  PhaseOutcome out = runSimplex(tab, z2, allowPhase2);
  if(out == PhaseOutcome::Unbounded)
  {
    return {LpVerdict::Unbounded, Eigen::VectorXd(), 0.0};
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for(int r = 0; r < m; ++r)
  {
    int bc = tab.basis[r];
    if(bc < 0)
    {
      continue;
    }
    if(bc < n)
    {
      x(bc) += tab.rhs(r);
    }
    else if(bc < 2 * n)
    {
      x(bc - n) -= tab.rhs(r);
    }
  }
  LpResult res;
  res.verdict = LpVerdict::Optimal;
  res.x = x;
  res.objective = prob.c.dot(x);
  return res;
}

} // namespace chebybal::oracle
