#include "chebybal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chebybal/rng.hpp"

namespace chebybal::oracle {

namespace {

// The recession cone {d : A d <= 0} contains a nonzero direction iff one of
// the 2*dim cone LPs max +-d_j (with the coordinate capped at 1) is
// positive.
bool isBounded(const HPolytope & p)
{
  const int n = p.dim();
  for(int j = 0; j < n; ++j)
  {
    for(double sign : {1.0, -1.0})
    {
      LpProblem lp;
      lp.c = Eigen::VectorXd::Zero(n);
      lp.c(j) = -sign; // maximize sign * d_j
      lp.A_ub.resize(p.rows() + 1, n);
      lp.A_ub.topRows(p.rows()) = p.normals;
      lp.A_ub.row(p.rows()).setZero();
      lp.A_ub(p.rows(), j) = sign;
      lp.b_ub = Eigen::VectorXd::Zero(p.rows() + 1);
      lp.b_ub(p.rows()) = 1.0;
      LpResult res = solveSimplex(lp);
      if(res.verdict != LpVerdict::Optimal || -res.objective > 1e-7)
      {
        return false;
      }
    }
  }
  return true;
}

} // namespace

ChebyCenter chebyshevLP(const Eigen::MatrixXd & G, const Eigen::VectorXd & h,
                        const Eigen::MatrixXd & A_eq, const Eigen::VectorXd & b_eq)
{
  const int n = static_cast<int>(G.cols());
  const int m = static_cast<int>(G.rows());

  LpProblem lp;
  lp.c = Eigen::VectorXd::Zero(n + 1);
  lp.c(n) = -1.0; // max r
  lp.A_ub.resize(m + 1, n + 1);
  lp.A_ub.topLeftCorner(m, n) = G;
  for(int j = 0; j < m; ++j)
  {
    lp.A_ub(j, n) = G.row(j).norm();
  }
  lp.A_ub.row(m).setZero();
  lp.A_ub(m, n) = -1.0; // r >= 0
  lp.b_ub.resize(m + 1);
  lp.b_ub << h, 0.0;
  if(A_eq.rows() > 0)
  {
    lp.A_eq.resize(A_eq.rows(), n + 1);
    lp.A_eq << A_eq, Eigen::VectorXd::Zero(A_eq.rows());
    lp.b_eq = b_eq;
  }

  LpResult res = solveSimplex(lp);
  ChebyCenter out;
  if(res.verdict == LpVerdict::Infeasible)
  {
    out.kind = ChebyKind::Empty;
    return out;
  }
  if(res.verdict == LpVerdict::Unbounded)
  {
    out.kind = ChebyKind::Unbounded;
    return out;
  }
  out.kind = ChebyKind::Ok;
  out.center = res.x.head(n);
  out.radius = res.x(n);
  return out;
}

ChebyCenter chebyshevLP(const HPolytope & p)
{
  if(p.rows() == 0)
  {
    throw Error("chebyshevLP: empty row list");
  }
  ChebyCenter ball = chebyshevLP(p.normals, p.offsets, Eigen::MatrixXd(), Eigen::VectorXd());
  if(ball.kind == ChebyKind::Empty)
  {
    return ball;
  }
  if(!isBounded(p))
  {
    ball.kind = ChebyKind::Unbounded;
    ball.center.resize(0);
    ball.radius = 0.0;
  }
  return ball;
}

VPolytope enumerateVertices(const HPolytope & p, int maxDim, int maxRows)
{
  const int n = p.dim();
  const int m = p.rows();
  if(n > maxDim)
  {
    throw Error("enumerateVertices: dimension cap exceeded");
  }
  if(m > maxRows)
  {
    throw Error("enumerateVertices: row cap exceeded");
  }

  VPolytope out;
  if(m < n)
  {
    return out;
  }
  const double scale = std::max(1.0, p.offsets.lpNorm<Eigen::Infinity>());

  std::vector<int> idx(n);
  for(int i = 0; i < n; ++i)
  {
    idx[i] = i;
  }
  while(true)
  {
    Eigen::MatrixXd B(n, n);
    Eigen::VectorXd rhs(n);
    for(int i = 0; i < n; ++i)
    {
      B.row(i) = p.normals.row(idx[i]);
      rhs(i) = p.offsets(idx[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if(lu.isInvertible())
    {
      Eigen::VectorXd v = lu.solve(rhs);
      if(((p.normals * v - p.offsets).array() <= 1e-8 * scale).all())
      {
        bool dup = false;
        for(const auto & w : out.vertices)
        {
          if((w - v).lpNorm<Eigen::Infinity>() <= 1e-8 * std::max(1.0, v.lpNorm<Eigen::Infinity>()))
          {
            dup = true;
            break;
          }
        }
        if(!dup)
        {
          out.vertices.push_back(v);
        }
      }
    }
    // next combination
    int k = n - 1;
    while(k >= 0 && idx[k] == m - n + k)
    {
      --k;
    }
    if(k < 0)
    {
      break;
    }
    ++idx[k];
    for(int i = k + 1; i < n; ++i)
    {
      idx[i] = idx[i - 1] + 1;
    }
  }
  return out;
}

namespace {

// Monotone-chain hull, counter-clockwise.
std::vector<Vec2> convexHull(std::vector<Vec2> pts)
{
  std::sort(pts.begin(), pts.end(), [](const Vec2 & a, const Vec2 & b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2 & a, const Vec2 & b) {
                          return (a - b).norm() <= 1e-12;
                        }),
            pts.end());
  auto cross = [](const Vec2 & o, const Vec2 & a, const Vec2 & b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  const int n = static_cast<int>(pts.size());
  if(n <= 2)
  {
    return pts;
  }
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for(int i = 0; i < n; ++i)
  {
    while(k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0)
    {
      --k;
    }
    hull[k++] = pts[i];
  }
  for(int i = n - 2, lower = k + 1; i >= 0; --i)
  {
    while(k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0)
    {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double distanceToSegment(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  Vec2 ab = b - a;
  double t = ab.squaredNorm() > 0.0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

} // namespace

PolygonCheck supportPolygonCheck(const std::vector<Contact> & contacts, const Vec3 & com)
{
  std::vector<Vec2> pts;
  double z0 = 0.0;
  bool first = true;
  for(const auto & c : contacts)
  {
    if(!c.active())
    {
      continue;
    }
    if(c.mode != ContactMode::Fixed)
    {
      throw Error("supportPolygonCheck: requires fixed-only contacts");
    }
    Vec3 normal = c.transform.rotation.col(2);
    if(std::abs(normal.z() - 1.0) > 1e-9)
    {
      throw Error("supportPolygonCheck: contact '" + c.id + "' is not horizontal");
    }
    if(first)
    {
      z0 = c.transform.origin.z();
      first = false;
    }
    else if(std::abs(c.transform.origin.z() - z0) > 1e-9)
    {
      throw Error("supportPolygonCheck: contacts are not coplanar");
    }
    pts.push_back(c.transform.origin.head<2>());
  }
  if(pts.empty())
  {
    throw Error("supportPolygonCheck: no active contacts");
  }

  PolygonCheck out;
  out.hull = convexHull(pts);
  Vec2 p = com.head<2>();

  const int n = static_cast<int>(out.hull.size());
  if(n == 1)
  {
    out.margin = -(p - out.hull[0]).norm() + 0.0;
    out.inside = out.margin >= 0.0;
    return out;
  }
  if(n == 2)
  {
    out.margin = -distanceToSegment(p, out.hull[0], out.hull[1]) + 0.0;
    out.inside = out.margin >= -1e-12;
    return out;
  }

  bool inside = true;
  double minEdge = std::numeric_limits<double>::infinity();
  double minDist = std::numeric_limits<double>::infinity();
  for(int i = 0; i < n; ++i)
  {
    const Vec2 & a = out.hull[i];
    const Vec2 & b = out.hull[(i + 1) % n];
    Vec2 edge = b - a;
    // hull is counter-clockwise: inward normal is (-edge.y, edge.x)
    Vec2 inward{-edge.y(), edge.x()};
    double signedDist = inward.normalized().dot(p - a);
    minEdge = std::min(minEdge, signedDist);
    if(signedDist < 0.0)
    {
      inside = false;
    }
    minDist = std::min(minDist, distanceToSegment(p, a, b));
  }
  out.inside = inside;
  out.margin = inside ? minEdge : -minDist + 0.0;
  return out;
}

BallSampleReport ballSample(const ChebyProblem & problem, const ChebySolution & solution,
                            int samples, uint64_t seed, double rhoScale)
{
  if(solution.status != SolveStatus::Optimal)
  {
    throw Error("ballSample: solution is not Optimal");
  }
  const int nY = problem.numY();
  const int m = problem.numIneq();
  Eigen::MatrixXd G = problem.scaledG();
  Eigen::VectorXd h = problem.scaledH();
  Eigen::VectorXd y = solution.x_scaled.head(nY);
  const double r = solution.radius;

  BallSampleReport report;
  report.samples = samples;
  Rng rng(seed);
  const double tol = 1e-8 * std::max(1.0, h.lpNorm<Eigen::Infinity>());
  auto probe = [&](const Eigen::VectorXd & a, double rho) {
    double worst = (G * (y + rho * a) - h).maxCoeff();
    report.max_residual = std::max(report.max_residual, worst);
    if(worst > tol)
    {
      ++report.violations;
    }
  };

  if(rhoScale > 1.0 && r > 0.0)
  {
    // normal of the tightest row, where an inflated ball must poke out
    int tightest = -1;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd slack = h - G * y;
    for(int j = 0; j < m; ++j)
    {
      if(problem.xi(j) > 1e-12 && slack(j) / problem.xi(j) < best)
      {
        best = slack(j) / problem.xi(j);
        tightest = j;
      }
    }
    if(tightest >= 0)
    {
      probe(G.row(tightest).transpose() / G.row(tightest).norm(), rhoScale * r);
    }
  }
  for(int s = 0; s < samples; ++s)
  {
    Eigen::VectorXd a(nY);
    for(int i = 0; i < nY; ++i)
    {
      a(i) = rng.gaussian();
    }
    double norm = a.norm();
    if(norm == 0.0)
    {
      continue;
    }
    a /= norm;
    probe(a, rhoScale * r * rng.uniform());
  }
  return report;
}

} // namespace chebybal::oracle
