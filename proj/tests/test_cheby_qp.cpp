#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include <chebybal/cheby_qp.hpp>
#include <chebybal/oracle.hpp>
#include <chebybal/rng.hpp>

#include "test_util.hpp"

using namespace chebybal;
using testutil::randomStance;
using testutil::zeroWeightProblem;

namespace {

std::vector<Contact> twoFeet()
{
  std::vector<Contact> cs(2);
  cs[0].id = "lf";
  cs[0].transform.origin = Vec3(0, 0.1, 0);
  cs[1].id = "rf";
  cs[1].transform.origin = Vec3(0, -0.1, 0);
  for(auto & c : cs)
  {
    c.limits.mu = 0.7;
    c.limits.sigma_x = 0.05;
    c.limits.sigma_y = 0.03;
    c.limits.fz_max = 600.0;
    c.limits.tz_min = -5.0;
    c.limits.tz_max = 5.0;
  }
  return cs;
}

} // namespace

TEST_CASE("augment appends the radius machinery")
{
  ConstraintBlocks blocks = assemble(40.0, 9.81, twoFeet());
  REQUIRE(blocks.G_ineq.rows() == 24);
  ChebyProblem p = zeroWeightProblem(blocks);

  CHECK(p.G_star.rows() == 25);
  CHECK(p.G_star.cols() == 16);
  // appended row is (0,...,0,-1) with zero right-hand side
  CHECK(p.G_star.row(24).head(15).norm() == 0.0);
  CHECK(p.G_star(24, 15) == -1.0);
  CHECK(p.h_star(24) == 0.0);
  CHECK(p.A_star.col(15).norm() == 0.0);

  // xi matches the row norms of the scaled G over the Y columns
  for(int j = 0; j < 24; ++j)
  {
    CHECK(p.xi(j) == doctest::Approx(p.G_star.row(j).head(15).norm()));
    CHECK(p.G_star(j, 15) == p.xi(j));
  }

  // pure radius maximization degenerates to the Chebyshev LP
  CHECK(p.P.size() == 0);
  CHECK(p.q(15) == -1.0);
  CHECK(p.q.head(15).norm() == 0.0);
}

TEST_CASE("augment handles a degenerate all-zero row")
{
  ConstraintBlocks blocks = assemble(40.0, 9.81, twoFeet());
  blocks.G_ineq.row(3).setZero();
  blocks.h_ineq(3) = 1.0;
  ChebyProblem p = zeroWeightProblem(blocks);
  CHECK(p.xi(3) == 0.0);
  CHECK(p.G_star.row(3).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("augment validates weights and dimensions")
{
  ConstraintBlocks blocks = assemble(40.0, 9.81, twoFeet());
  ChebyTargets bad;
  bad.y_des = Eigen::VectorXd::Zero(7);
  bad.weights = Eigen::VectorXd::Zero(7);
  CHECK_THROWS_AS(augment(blocks, bad), Error);

  ChebyTargets neg = ChebyTargets::fromWeights(blocks, ChebyWeights{}, Vec3::Zero());
  neg.weights(0) = -1.0;
  CHECK_THROWS_AS(augment(blocks, neg), Error);
}

TEST_CASE("radius weight stays strictly below every tracked weight")
{
  ConstraintBlocks blocks = assemble(40.0, 9.81, twoFeet());
  ChebyProblem p = augment(blocks, ChebyTargets::fromWeights(blocks, ChebyWeights{}, Vec3::Zero()));
  const int nY = p.numY();
  double radiusDiag = p.P(nY, nY);
  CHECK(radiusDiag > 0.0);
  for(int i = 0; i < nY; ++i)
  {
    CHECK(radiusDiag < p.P(i, i));
  }
}

TEST_CASE("symmetric stance splits gravity evenly")
{
  ConstraintBlocks blocks = assemble(40.0, 9.81, twoFeet());
  ChebyTargets targets = ChebyTargets::fromWeights(blocks, ChebyWeights{}, Vec3(0, 0, 0.8));
  ChebySolution sol = ChebySolver{}.solve(augment(blocks, targets));
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.wrenches[0].force.z() == doctest::Approx(196.2));
  CHECK(sol.wrenches[1].force.z() == doctest::Approx(196.2));
  CHECK(std::abs(sol.com.x()) < 1e-9);
  CHECK(std::abs(sol.com.y()) < 1e-9);
  CHECK(sol.max_violation < 1e-8);
}

TEST_CASE("wrench range is l times the radius")
{
  ChebySolution sol;
  sol.status = SolveStatus::Optimal;
  sol.radius = 2.5;
  CHECK(wrenchRange(sol, 4).r_w == 10.0);
  CHECK(wrenchRange(sol, 1).r_w == 2.5);
  sol.radius = 0.0;
  CHECK(wrenchRange(sol, 3).r_w == 0.0);
  sol.status = SolveStatus::Infeasible;
  CHECK_THROWS_AS(wrenchRange(sol, 2), Error);
}

TEST_CASE("random stance radii match the LP oracle and touch enough rows")
{
  Rng rng(101);
  ChebySolver solver;
  int compared = 0;
  for(int trial = 0; trial < 200; ++trial)
  {
    auto st = randomStance(rng);
    ConstraintBlocks blocks = assemble(st.mass, 9.81, st.contacts);
    ChebyProblem prob = zeroWeightProblem(blocks);
    ChebySolution sol = solver.solve(prob);
    auto lp = oracle::chebyshevLP(prob.scaledG(), prob.scaledH(), prob.scaledA(), prob.b_eq);
    bool qpFeas = sol.status == SolveStatus::Optimal;
    REQUIRE(qpFeas == (lp.kind == oracle::ChebyKind::Ok));
    if(!qpFeas)
    {
      continue;
    }
    ++compared;
    CHECK(std::abs(sol.radius - lp.radius) <= 1e-6 * std::max(1.0, lp.radius));
    CHECK(sol.max_violation < 1e-8);
  }
  CHECK(compared > 150);
}

TEST_CASE("random bounded polytopes: radius agreement and facet touching")
{
  Rng rng(77);
  ActiveSetQp as;
  int touchable = 0, touched = 0;
  for(int trial = 0; trial < 500; ++trial)
  {
    // random sphere cuts define the ball; a far-out box guards boundedness
    int dim = rng.uniformInt(2, 6);
    int cuts = rng.uniformInt(dim + 2, dim + 12);
    int m = 2 * dim + cuts;
    Eigen::MatrixXd G(m, dim);
    Eigen::VectorXd h(m);
    for(int i = 0; i < dim; ++i)
    {
      G.row(2 * i).setZero();
      G(2 * i, i) = 1.0;
      h(2 * i) = 3.0;
      G.row(2 * i + 1).setZero();
      G(2 * i + 1, i) = -1.0;
      h(2 * i + 1) = 3.0;
    }
    for(int j = 0; j < cuts; ++j)
    {
      Eigen::VectorXd n(dim);
      for(int i = 0; i < dim; ++i)
      {
        n(i) = rng.gaussian();
      }
      n.normalize();
      G.row(2 * dim + j) = (rng.uniform(0.2, 3.0) * n).transpose();
      h(2 * dim + j) = rng.uniform(0.8, 1.3) * G.row(2 * dim + j).norm();
    }
    QpProblem qp;
    qp.q = Eigen::VectorXd::Zero(dim + 1);
    qp.q(dim) = -1.0;
    qp.G.resize(m + 1, dim + 1);
    qp.G.topLeftCorner(m, dim) = G;
    for(int j = 0; j < m; ++j)
    {
      qp.G(j, dim) = G.row(j).norm();
    }
    qp.G.row(m).setZero();
    qp.G(m, dim) = -1.0;
    qp.h.resize(m + 1);
    qp.h << h, 0.0;

    QpResult r1 = as.solve(qp);
    oracle::ChebyCenter r2 = oracle::chebyshevLP(oracle::HPolytope{G, h});
    REQUIRE(r1.status == QpStatus::Optimal);
    REQUIRE(r2.kind == oracle::ChebyKind::Ok);
    CHECK(std::abs(r1.x(dim) - r2.radius) <= 1e-6 * std::max(1.0, r2.radius));

    // the ball touches at least dim+1 facets except at degenerate optima
    // (non-unique centers), which the sphere-cut generator makes rare
    if(r1.x(dim) > 1e-9)
    {
      ++touchable;
      int tight = 0;
      for(int j = 0; j < m; ++j)
      {
        double slack = h(j) - G.row(j).dot(r1.x.head(dim)) - qp.G(j, dim) * r1.x(dim);
        if(std::abs(slack) < 1e-5 * (1.0 + std::abs(h(j))))
        {
          ++tight;
        }
      }
      if(tight >= dim + 1)
      {
        ++touched;
      }
    }
  }
  CHECK(touchable > 400);
  CHECK(touched >= touchable * 95 / 100);
}

TEST_CASE("optimal solutions satisfy equilibrium to 1e-6")
{
  Rng rng(55);
  ChebySolver solver;
  for(int trial = 0; trial < 100; ++trial)
  {
    auto st = randomStance(rng);
    ConstraintBlocks blocks = assemble(st.mass, 9.81, st.contacts);
    ChebyTargets targets = ChebyTargets::fromWeights(blocks, ChebyWeights{}, Vec3(0, 0, 0.8));
    ChebySolution sol = solver.solve(augment(blocks, targets));
    if(sol.status != SolveStatus::Optimal)
    {
      continue;
    }
    auto check = testutil::checkDirectly(st.mass, 9.81, st.contacts, sol.com, sol.wrenches,
                                         sol.contact_ids);
    CHECK(check.ok);
  }
}

TEST_CASE("ball feasibility on optimal solutions")
{
  Rng rng(56);
  ChebySolver solver;
  int tested = 0;
  for(int trial = 0; trial < 30 && tested < 10; ++trial)
  {
    auto st = randomStance(rng);
    ConstraintBlocks blocks = assemble(st.mass, 9.81, st.contacts);
    ChebyProblem prob = zeroWeightProblem(blocks);
    ChebySolution sol = solver.solve(prob);
    if(sol.status != SolveStatus::Optimal || sol.radius < 1e-6)
    {
      continue;
    }
    ++tested;
    auto report = oracle::ballSample(prob, sol, 1000, 7 + trial);
    CHECK(report.violations == 0);
  }
  CHECK(tested == 10);
}

TEST_CASE("shrinking a friction coefficient never grows the radius")
{
  Rng rng(57);
  ChebySolver solver;
  int tested = 0;
  for(int trial = 0; trial < 40 && tested < 15; ++trial)
  {
    auto st = randomStance(rng, 2, 4, false);
    ConstraintBlocks blocks = assemble(st.mass, 9.81, st.contacts);
    ChebySolution base = solver.solve(zeroWeightProblem(blocks));
    if(base.status != SolveStatus::Optimal)
    {
      continue;
    }
    ++tested;
    auto tightened = st.contacts;
    tightened[rng.uniformInt(0, static_cast<int>(tightened.size()) - 1)].limits.mu *= 0.7;
    ChebySolution tight = solver.solve(zeroWeightProblem(assemble(st.mass, 9.81, tightened)));
    if(tight.status == SolveStatus::Optimal)
    {
      CHECK(tight.radius <= base.radius + 1e-9);
    }
  }
  CHECK(tested == 15);
}

TEST_CASE("cold solves are bit-identical")
{
  Rng rng(58);
  auto st = randomStance(rng);
  ConstraintBlocks blocks = assemble(st.mass, 9.81, st.contacts);
  ChebyProblem prob = zeroWeightProblem(blocks);
  ChebySolver solver;
  ChebySolution a = solver.solve(prob);
  ChebySolution b = solver.solve(prob);
  REQUIRE(a.x_scaled.size() == b.x_scaled.size());
  CHECK(std::memcmp(a.x_scaled.data(), b.x_scaled.data(), sizeof(double) * a.x_scaled.size())
        == 0);
}

TEST_CASE("warm start: identical, perturbed and structure-mismatched problems")
{
  ConstraintBlocks blocks = assemble(40.0, 9.81, twoFeet());
  ChebyTargets targets = ChebyTargets::fromWeights(blocks, ChebyWeights{}, Vec3(0, 0, 0.8));
  ChebyProblem prob = augment(blocks, targets);
  ChebySolver solver;
  ChebySolution cold = solver.solve(prob);
  REQUIRE(cold.status == SolveStatus::Optimal);

  ChebySolution warm = solver.solve(prob, cold);
  CHECK_FALSE(warm.cold_start_fallback);
  CHECK((warm.x_scaled - cold.x_scaled).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(warm.iterations <= cold.iterations);

  // CoM target moved 1 mm: warm result equals the cold solve of the
  // perturbed problem
  ChebyTargets moved = targets;
  moved.y_des(0) += 1e-3;
  ChebyProblem perturbed = augment(blocks, moved);
  ChebySolution warmMoved = solver.solve(perturbed, cold);
  ChebySolution coldMoved = solver.solve(perturbed);
  REQUIRE(warmMoved.status == SolveStatus::Optimal);
  CHECK((warmMoved.x_scaled - coldMoved.x_scaled).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK(warmMoved.max_violation < 1e-8);

  // contact-mode change forces the cold-start fallback; the slide runs
  // along y so the pinned friction force adds no yaw moment
  auto contacts = twoFeet();
  contacts[0].mode = ContactMode::Sliding;
  contacts[0].sliding = SlidingSpec{Vec2(0, 0.1), 0.4, 150.0, SignConvention::OpposeVelocity};
  ConstraintBlocks changed = assemble(40.0, 9.81, contacts);
  ChebyProblem probChanged =
      augment(changed, ChebyTargets::fromWeights(changed, ChebyWeights{}, Vec3(0, 0, 0.8)));
  ChebySolution fallback = solver.solve(probChanged, cold);
  CHECK(fallback.cold_start_fallback);
  CHECK(fallback.status == SolveStatus::Optimal);
}

TEST_CASE("unit scaling changes the ball but not feasibility")
{
  ConstraintBlocks blocks = assemble(40.0, 9.81, twoFeet());
  UnitScaling wide{200.0, 20.0, 1.0};
  ChebySolution a = ChebySolver{}.solve(zeroWeightProblem(blocks, UnitScaling{}));
  ChebySolution b = ChebySolver{}.solve(zeroWeightProblem(blocks, wide));
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(a.radius != doctest::Approx(b.radius).epsilon(1e-6));
  // physical wrenches still satisfy the same constraint set
  auto check = testutil::checkDirectly(40.0, 9.81, twoFeet(), b.com, b.wrenches, b.contact_ids);
  CHECK(check.worst <= 1e-6);
}
