#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chebybal/cheby_qp.hpp>
#include <chebybal/friction_est.hpp>
#include <chebybal/rng.hpp>

#include "test_util.hpp"

using namespace chebybal;

TEST_CASE("measureMu is the tangential/normal ratio")
{
  CHECK(measureMu(Vec3(3, 4, 10)) == doctest::Approx(0.5));
  CHECK(measureMu(Vec3(0, 0, 50)) == 0.0);
  CHECK(measureMu(Vec3(1, 2, -10)) == doctest::Approx(std::sqrt(5.0) / 10.0));
  CHECK_THROWS_AS(measureMu(Vec3(1, 0, 0)), Error);
}

TEST_CASE("two-tap filter blends the previous raw measurement")
{
  // worked value: gamma 0.8, previous measurement 0.5, new 0.3 -> 0.46
  FrictionEstimator est(0.8, 5.0, 0.5);
  est.update(Vec3(3, 0, 10)); // mu_mes = 0.3
  CHECK(est.muFiltered() == doctest::Approx(0.46));
  CHECK(est.muMeasuredPrev() == doctest::Approx(0.3));

  // the next update blends the raw 0.3, not the filtered 0.46
  est.update(Vec3(6, 0, 10)); // mu_mes = 0.6
  CHECK(est.muFiltered() == doctest::Approx(0.8 * 0.3 + 0.2 * 0.6));
}

TEST_CASE("normal forces below the threshold hold the estimate")
{
  FrictionEstimator est(0.8, 5.0, 0.5);
  est.update(Vec3(3, 0, 1.0)); // |fz| below 5 N
  CHECK(est.muFiltered() == 0.5);
  CHECK(est.muMeasuredPrev() == 0.5);
  est.update(Vec3(3, 0, 0.0)); // zero normal force absorbed too
  CHECK(est.muFiltered() == 0.5);
}

TEST_CASE("gamma = 0 passes the measurement through")
{
  FrictionEstimator est(0.0, 5.0, 0.9);
  est.update(Vec3(3, 0, 10));
  CHECK(est.muFiltered() == doctest::Approx(0.3));
}

TEST_CASE("recursive filter converges geometrically")
{
  FrictionEstimator est(0.9, 5.0, 0.2);
  int steps = 0;
  while(std::abs(est.muFiltered() - 0.4) > 0.004 && steps < 100)
  {
    est.updateRecursive(Vec3(4, 0, 10)); // constant mu_mes = 0.4
    ++steps;
  }
  CHECK(steps <= 44); // 0.9^44 ~ 0.0097 of the initial 0.2 error

  FrictionEstimator frozen(1.0, 5.0, 0.2);
  for(int i = 0; i < 100; ++i)
  {
    frozen.updateRecursive(Vec3(4, 0, 10));
  }
  CHECK(frozen.muFiltered() == 0.2);
}

TEST_CASE("recursive filter attenuates noise by sqrt((1-g)/(1+g))")
{
  Rng rng(8);
  const double gamma = 0.9, muTrue = 0.4, sigma = 0.05;
  FrictionEstimator est(gamma, 5.0, muTrue);
  double sum = 0.0, sumSq = 0.0;
  const int burnIn = 1000, samples = 100000;
  for(int i = 0; i < burnIn + samples; ++i)
  {
    double mes = muTrue + rng.gaussian(0.0, sigma);
    // feed a force realizing that measurement
    est.updateRecursive(Vec3(std::abs(mes) * 10.0, 0, 10));
    if(i >= burnIn)
    {
      sum += est.muFiltered();
      sumSq += est.muFiltered() * est.muFiltered();
    }
  }
  double mean = sum / samples;
  double stddev = std::sqrt(sumSq / samples - mean * mean);
  double expected = sigma * std::sqrt((1.0 - gamma) / (1.0 + gamma));
  CHECK(mean == doctest::Approx(muTrue).epsilon(0.01));
  CHECK(stddev == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("both filters are convex combinations of measurements")
{
  Rng rng(9);
  for(int trial = 0; trial < 100; ++trial)
  {
    double g = rng.uniform(0.0, 1.0);
    FrictionEstimator paper(g, 1.0, rng.uniform(0.1, 0.9));
    FrictionEstimator rec = paper;
    double lo = paper.muFiltered(), hi = paper.muFiltered();
    for(int i = 0; i < 20; ++i)
    {
      double mes = rng.uniform(0.0, 1.2);
      lo = std::min(lo, mes);
      hi = std::max(hi, mes);
      paper.update(Vec3(mes * 10, 0, 10));
      rec.updateRecursive(Vec3(mes * 10, 0, 10));
      CHECK(paper.muFiltered() >= lo - 1e-12);
      CHECK(paper.muFiltered() <= hi + 1e-12);
      CHECK(rec.muFiltered() >= lo - 1e-12);
      CHECK(rec.muFiltered() <= hi + 1e-12);
      CHECK(paper.muFiltered() >= 0.0);
    }
  }
}

TEST_CASE("estimator construction validates its parameters")
{
  CHECK_THROWS_AS(FrictionEstimator(-0.1, 5.0, 0.5), Error);
  CHECK_THROWS_AS(FrictionEstimator(1.1, 5.0, 0.5), Error);
  CHECK_THROWS_AS(FrictionEstimator(0.9, 0.0, 0.5), Error);
}

TEST_CASE("sliding wrenches from the QP reproduce the configured mu")
{
  Rng rng(10);
  ChebySolver solver;
  int tested = 0;
  for(int trial = 0; trial < 120 && tested < 10; ++trial)
  {
    auto st = testutil::randomStance(rng, 3, 4, true);
    const Contact * sliding = nullptr;
    for(const auto & c : st.contacts)
    {
      if(c.mode == ContactMode::Sliding)
      {
        sliding = &c;
      }
    }
    if(!sliding)
    {
      continue;
    }
    ConstraintBlocks blocks = assemble(st.mass, 9.81, st.contacts);
    ChebySolution sol = solver.solve(testutil::zeroWeightProblem(blocks));
    if(sol.status != SolveStatus::Optimal)
    {
      continue;
    }
    ++tested;
    Vec3 fLocal =
        sliding->transform.rotation.transpose() * sol.wrenchOf(sliding->id).force;
    CHECK(measureMu(fLocal)
          == doctest::Approx(sliding->sliding->mu_dynamic).epsilon(1e-9));
  }
  CHECK(tested == 10);
}
