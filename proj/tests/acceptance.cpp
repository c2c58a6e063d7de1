// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include <chebybal/cheby_qp.hpp>
#include <chebybal/harness.hpp>
#include <chebybal/oracle.hpp>
#include <chebybal/scenario_io.hpp>
#include <chebybal/trace_io.hpp>

#include "test_util.hpp"

#ifndef CHEBYBAL_SCENARIO_DIR
#define CHEBYBAL_SCENARIO_DIR "scenarios"
#endif

using namespace chebybal;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void criterion(int n, const char * name, bool pass, const std::string & detail)
{
  std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", n, name, detail.c_str());
  if(!pass)
  {
    ++failures;
  }
}

double seconds(Clock::time_point a, Clock::time_point b)
{
  return std::chrono::duration<double>(b - a).count();
}

std::string fmt(const char * f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

} // namespace

int main()
{
  ChebySolver solver;
  Rng rng(20260810);

  // Shared corpus of random stances with their zero-weight solutions.
  struct Case {
    testutil::RandomStance stance;
    ConstraintBlocks blocks;
    ChebyProblem problem;
    ChebySolution solution;
  };
  std::vector<Case> corpus;

  // 1. Oracle equivalence on 500 stance polytopes, < 60 s.
  {
    auto t0 = Clock::now();
    int compared = 0, agree = 0, verdictsAgree = 0;
    double worstRel = 0.0;
    for(int trial = 0; trial < 500; ++trial)
    {
      Case c{testutil::randomStance(rng, 2, 4, true), {}, {}, {}};
      c.blocks = assemble(c.stance.mass, 9.81, c.stance.contacts);
      c.problem = testutil::zeroWeightProblem(c.blocks);
      c.solution = solver.solve(c.problem);
      auto lp = oracle::chebyshevLP(c.problem.scaledG(), c.problem.scaledH(),
                                    c.problem.scaledA(), c.problem.b_eq);
      bool qpFeas = c.solution.status == SolveStatus::Optimal;
      bool lpFeas = lp.kind == oracle::ChebyKind::Ok;
      if(qpFeas == lpFeas)
      {
        ++verdictsAgree;
      }
      if(qpFeas && lpFeas)
      {
        ++compared;
        double rel = std::abs(c.solution.radius - lp.radius) / std::max(1.0, lp.radius);
        worstRel = std::max(worstRel, rel);
        if(rel <= 1e-6)
        {
          ++agree;
        }
        corpus.push_back(std::move(c));
      }
    }
    double dt = seconds(t0, Clock::now());
    bool pass = verdictsAgree == 500 && compared >= 400 && agree == compared && dt < 60.0;
    criterion(1, "oracle equivalence", pass,
              std::to_string(agree) + "/" + std::to_string(compared)
                  + " radii within 1e-6 rel (worst " + fmt("%.2e", worstRel) + "), verdicts "
                  + std::to_string(verdictsAgree) + "/500, " + fmt("%.1f", dt) + " s");
  }

  // 2. Equilibrium conservation over the corpus and the demo-scenario trace.
  {
    double worst = 0.0;
    for(const auto & c : corpus)
    {
      auto check = testutil::checkDirectly(c.stance.mass, 9.81, c.stance.contacts,
                                           c.solution.com, c.solution.wrenches,
                                           c.solution.contact_ids);
      worst = std::max(worst, check.worst);
    }
    Scenario demo = parseScenarioFile(std::string(CHEBYBAL_SCENARIO_DIR) + "/six_state_demo.txt");
    RunResult trace = run(demo, 7);
    worst = std::max(worst, trace.summary.max_eq_residual);
    bool pass = worst <= 1e-6 && trace.summary.completed;
    criterion(2, "equilibrium conservation", pass,
              "max residual " + fmt("%.2e", worst) + " N(.m) across "
                  + std::to_string(corpus.size()) + " stances + demo trace");
  }

  // 3. Sliding-cone exactness on every sliding contact in the corpus.
  {
    double worst = 0.0;
    int slidingCount = 0;
    for(const auto & c : corpus)
    {
      for(size_t k = 0; k < c.solution.contact_ids.size(); ++k)
      {
        const Contact * ct = nullptr;
        for(const auto & cand : c.stance.contacts)
        {
          if(cand.id == c.solution.contact_ids[k])
          {
            ct = &cand;
          }
        }
        if(!ct || ct->mode != ContactMode::Sliding)
        {
          continue;
        }
        ++slidingCount;
        Vec3 fl = ct->transform.rotation.transpose() * c.solution.wrenches[k].force;
        double ftan = std::hypot(fl.x(), fl.y());
        double target = ct->sliding->mu_dynamic * fl.z();
        worst = std::max(worst, std::abs(ftan - target) / std::max(1.0, target));
      }
    }
    bool pass = slidingCount > 30 && worst <= 1e-9;
    criterion(3, "sliding-cone exactness", pass,
              std::to_string(slidingCount) + " sliding contacts, worst rel dev "
                  + fmt("%.2e", worst));
  }

  // 4. Ball feasibility: 10k directions on 50 solutions + planted violation.
  {
    int tested = 0, cleanOk = 0, plantedOk = 0;
    for(const auto & c : corpus)
    {
      if(tested >= 50)
      {
        break;
      }
      if(c.solution.radius < 1e-6)
      {
        continue;
      }
      ++tested;
      auto clean = oracle::ballSample(c.problem, c.solution, 10000, 1000 + tested);
      if(clean.violations == 0)
      {
        ++cleanOk;
      }
      auto planted = oracle::ballSample(c.problem, c.solution, 100, 2000 + tested, 1.01);
      if(planted.violations > 0)
      {
        ++plantedOk;
      }
    }
    bool pass = tested == 50 && cleanOk == 50 && plantedOk == 50;
    criterion(4, "ball feasibility", pass,
              std::to_string(cleanOk) + "/50 clean at rho <= r, " + std::to_string(plantedOk)
                  + "/50 planted violations detected at 1.01 r");
  }

  // 5. Coplanar consistency: CoM projects inside the support polygon.
  {
    int solved = 0, inside = 0;
    double worstMargin = 1e9;
    for(int trial = 0; trial < 1000; ++trial)
    {
      auto st = testutil::randomCoplanarPointStance(rng);
      ConstraintBlocks blocks = assemble(st.mass, 9.81, st.contacts);
      Vec3 target(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0.8);
      ChebyTargets targets = ChebyTargets::fromWeights(blocks, ChebyWeights{}, target);
      ChebySolution sol = solver.solve(augment(blocks, targets));
      if(sol.status != SolveStatus::Optimal)
      {
        continue;
      }
      ++solved;
      auto check = oracle::supportPolygonCheck(st.contacts, sol.com);
      worstMargin = std::min(worstMargin, check.margin);
      if(check.margin >= -1e-8)
      {
        ++inside;
      }
    }
    bool pass = solved >= 990 && inside == solved;
    criterion(5, "coplanar consistency", pass,
              std::to_string(inside) + "/" + std::to_string(solved)
                  + " CoM projections inside the hull (worst margin "
                  + fmt("%.2e", worstMargin) + " m)");
  }

  // 6. Wrench range identity r_w = l * r.
  {
    bool pass = !corpus.empty();
    for(const auto & c : corpus)
    {
      WrenchRange wr = wrenchRange(c.solution, c.blocks.num_active);
      if(wr.r_w != c.blocks.num_active * c.solution.radius || wr.contact_count != c.blocks.num_active)
      {
        pass = false;
      }
    }
    criterion(6, "wrench range identity", pass,
              "r_w == l*r exactly on " + std::to_string(corpus.size()) + " solutions");
  }

  // 7. Six-state demo scenario replication.
  {
    Scenario sc = parseScenarioFile(std::string(CHEBYBAL_SCENARIO_DIR) + "/six_state_demo.txt");
    ScenarioRunner runner(sc, 7);
    RunResult res = runner.run();
    double worstForceErr = 0.0;
    for(const auto & row : res.rows)
    {
      auto contacts = runner.contactsAt(row.tick);
      for(size_t i = 0; i < sc.contacts.size(); ++i)
      {
        const Contact * c = nullptr;
        for(const auto & cand : contacts)
        {
          if(cand.id == sc.contacts[i].id)
          {
            c = &cand;
          }
        }
        if(!c || c->mode != ContactMode::Sliding)
        {
          continue;
        }
        Vec3 fl = c->transform.rotation.transpose() * Vec3(row.wrenches[i].head<3>());
        worstForceErr = std::max(worstForceErr, std::abs(fl.z() - c->sliding->fz_des));
      }
    }
    bool pass = res.summary.completed && res.summary.min_radius > 0.0 && worstForceErr <= 1e-6;
    criterion(7, "six-state scenario replication", pass,
              std::string(res.summary.completed ? "completed" : "halted") + ", min radius "
                  + fmt("%.4f", res.summary.min_radius) + ", max |fz - target| "
                  + fmt("%.2e", worstForceErr) + " N over " + std::to_string(res.rows.size())
                  + " ticks");
  }

  // 8. Friction estimation: noisy recursive settles, two-tap filter exact.
  {
    Scenario sc;
    sc.robot = {40.0, 9.81};
    sc.noise_sigma = 0.5;
    sc.filter = FilterKind::Recursive;
    Contact rf;
    rf.id = "rf";
    rf.transform.origin = Vec3(0, -0.12, 0);
    rf.limits = ContactLimits{0.8, 0.05, 0.03, 0.0, 700.0, -8.0, 8.0};
    Contact lf = rf;
    lf.id = "lf";
    lf.transform.origin = Vec3(0, 0.12, 0);
    Contact hand = rf;
    hand.id = "hand";
    hand.transform.origin = Vec3(0.3, 0, 0);
    hand.mode = ContactMode::Sliding;
    hand.sliding = SlidingSpec{Vec2(0.2, 0), 0.4, 100.0, SignConvention::OpposeVelocity};
    sc.contacts = {rf, lf, hand};
    FsmState st;
    st.name = "slide";
    st.duration_ticks = 201;
    st.com_target = Vec3(0, 0, 0.8);
    sc.states = {st};
    RunResult res = run(sc, 99);
    double muAfter200 = res.rows.back().mu_filt[2];
    bool recursiveOk =
        res.summary.completed && std::abs(muAfter200 - 0.4) <= 0.05 * 0.4;

    FrictionEstimator worked(0.8, 5.0, 0.5);
    worked.update(Vec3(3, 0, 10));
    bool twoTapOk = worked.muFiltered() == 0.8 * 0.5 + 0.2 * 0.3;

    criterion(8, "friction estimation", recursiveOk && twoTapOk,
              "recursive mu after 200 noisy ticks " + fmt("%.4f", muAfter200)
                  + " (true 0.4, +-5%), two-tap worked value "
                  + fmt("%.3f", worked.muFiltered()) + " == 0.46");
  }

  // 9. Timing: median warm solve <= 2 ms, per-tick pipeline <= 5 ms.
  {
    Scenario sc = parseScenarioFile(std::string(CHEBYBAL_SCENARIO_DIR) + "/six_state_demo.txt");
    ScenarioRunner runner(sc, 7);
    // 4-contact stance of the hand_place state, warm-started repeatedly
    auto contacts = runner.contactsAt(150);
    ConstraintBlocks blocks = assemble(sc.robot.mass, sc.robot.gravity, contacts);
    ChebyTargets targets = ChebyTargets::fromWeights(blocks, sc.weights, Vec3(0, 0, 0.78));
    ChebyProblem problem = augment(blocks, targets, sc.scaling);
    ChebySolution prev = solver.solve(problem);
    std::vector<double> warm;
    for(int i = 0; i < 2000; ++i)
    {
      ChebySolution s = solver.solve(problem, prev);
      warm.push_back(s.solve_time);
      prev = s;
    }
    std::sort(warm.begin(), warm.end());
    double medianWarm = warm[warm.size() / 2];

    std::vector<double> tickTimes;
    ScenarioRunner pipeline(sc, 7);
    for(int tick = 0; tick < 400; ++tick)
    {
      auto t0 = Clock::now();
      pipeline.step(tick);
      tickTimes.push_back(seconds(t0, Clock::now()));
    }
    std::sort(tickTimes.begin(), tickTimes.end());
    double medianTick = tickTimes[tickTimes.size() / 2];

    bool pass = medianWarm <= 2e-3 && medianTick <= 5e-3;
    criterion(9, "timing", pass,
              "median warm solve " + fmt("%.1f", medianWarm * 1e6)
                  + " us (<= 2 ms), median pipeline tick " + fmt("%.1f", medianTick * 1e6)
                  + " us (<= 5 ms)");
  }

  // 10. Determinism: identical seeds give byte-identical traces.
  {
    Scenario sc = parseScenarioFile(std::string(CHEBYBAL_SCENARIO_DIR) + "/six_state_demo.txt");
    sc.noise_sigma = 0.5;
    RunResult a = run(sc, 7);
    RunResult b = run(sc, 7);
    std::ostringstream csvA, csvB;
    writeTraceCsv(csvA, sc, a);
    writeTraceCsv(csvB, sc, b);
    bool pass = !csvA.str().empty() && csvA.str() == csvB.str();
    criterion(10, "determinism", pass,
              "two seed-7 noisy runs, " + std::to_string(csvA.str().size())
                  + " bytes each, byte-identical: " + (pass ? "yes" : "no"));
  }

  if(failures == 0)
  {
    std::printf("acceptance: all criteria passed\n");
  }
  else
  {
    std::printf("acceptance: %d criteria FAILED\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
