#pragma once

#include <cstdint>
#include <vector>

#include "chebybal/cheby_qp.hpp"
#include "chebybal/contacts.hpp"
#include "chebybal/simplex.hpp"

// Brute-force ground truth used by tests and the `validate` command only;
// nothing here is called from the solve path.
namespace chebybal::oracle {

// Polytope { x : normals.row(i) * x <= offsets(i) }.
struct HPolytope {
  Eigen::MatrixXd normals;
  Eigen::VectorXd offsets;

  int dim() const { return static_cast<int>(normals.cols()); }
  int rows() const { return static_cast<int>(normals.rows()); }
};

struct VPolytope {
  std::vector<Eigen::VectorXd> vertices;
};

enum class ChebyKind { Ok, Empty, Unbounded };

struct ChebyCenter {
  ChebyKind kind = ChebyKind::Empty;
  Eigen::VectorXd center;
  double radius = 0.0;
};

// Largest inscribed ball via the LP max r s.t. a_i'x + r|a_i| <= b_i,
// r >= 0, solved by the simplex core. The polytope is checked for
// boundedness first (recession-cone LPs) and rejected when unbounded.
ChebyCenter chebyshevLP(const HPolytope & p);

// Same program over a stance's H-representation: inequality rows carry the
// radius tightening, equality rows hold as-is. No boundedness precheck
// (stance polytopes are free along the CoM height); LP-level unboundedness
// is still reported.
ChebyCenter chebyshevLP(const Eigen::MatrixXd & G, const Eigen::VectorXd & h,
                        const Eigen::MatrixXd & A_eq, const Eigen::VectorXd & b_eq);

// Naive combinatorial enumeration over choose-dim row subsets; exponential,
// guarded by the dimension/row caps. Throws when the caps are exceeded.
VPolytope enumerateVertices(const HPolytope & p, int maxDim = 6, int maxRows = 60);

struct PolygonCheck {
  bool inside = false;
  double margin = 0.0; // signed distance of the CoM ground projection (m)
  std::vector<Vec2> hull;
};

// Convex hull of coplanar horizontal fixed-contact points against the CoM
// ground projection. Rejects non-coplanar or tilted input.
PolygonCheck supportPolygonCheck(const std::vector<Contact> & contacts, const Vec3 & com);

struct BallSampleReport {
  int samples = 0;
  int violations = 0;
  double max_residual = 0.0;
};

// Samples directions on the unit sphere of the scaled decision space and
// checks G(Y + rho a) <= h + tol for rho in [0, rhoScale * r]. With
// rhoScale > 1 the first probe aims along the tightest row's normal, the
// direction that must violate once the ball is inflated past the optimum.
BallSampleReport ballSample(const ChebyProblem & problem, const ChebySolution & solution,
                            int samples, uint64_t seed, double rhoScale = 1.0);

} // namespace chebybal::oracle
