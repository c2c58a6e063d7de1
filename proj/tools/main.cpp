#include <clocale>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <chebybal/harness.hpp>
#include <chebybal/oracle.hpp>
#include <chebybal/scenario_io.hpp>
#include <chebybal/trace_io.hpp>

using namespace chebybal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;

struct CommonOpts {
  std::string output;
  std::string format = "csv";
  uint64_t seed = 0;
  std::string filter;
  std::string sign;
  std::string weights_file;
  bool timing = false;
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Weight/scale overrides: `key value` lines, keys com, wrench,
// radius_factor, force_scale, torque_scale, length_scale.
void applyWeightsFile(Scenario & sc, const std::string & path)
{
  std::ifstream in(path);
  if(!in)
  {
    throw Error("cannot open weights file '" + path + "'");
  }
  std::string line;
  int lineNo = 0;
  while(std::getline(in, line))
  {
    ++lineNo;
    std::istringstream ss(line);
    std::string key;
    if(!(ss >> key) || key[0] == '#')
    {
      continue;
    }
    double value;
    if(!(ss >> value))
    {
      throw ParseError("missing value", lineNo, key);
    }
    if(key == "com") { sc.weights.com = value; }
    else if(key == "wrench") { sc.weights.wrench = value; }
    else if(key == "radius_factor") { sc.weights.radius_factor = value; }
    else if(key == "force_scale") { sc.scaling.force = value; }
    else if(key == "torque_scale") { sc.scaling.torque = value; }
    else if(key == "length_scale") { sc.scaling.length = value; }
    else
    {
      throw ParseError("unknown key '" + key + "'", lineNo, key);
    }
  }
}

Scenario loadScenario(const std::string & path, const CommonOpts & opts)
{
  Scenario sc = parseScenarioFile(path);
  if(!opts.weights_file.empty())
  {
    applyWeightsFile(sc, opts.weights_file);
  }
  if(opts.filter == "paper") { sc.filter = FilterKind::Paper; }
  else if(opts.filter == "recursive") { sc.filter = FilterKind::Recursive; }
  if(opts.sign == "paper") { sc.sign = SignConvention::PaperRaw; }
  else if(opts.sign == "oppose") { sc.sign = SignConvention::OpposeVelocity; }
  return sc;
}

// A stance file is a scenario without states; synthesize a one-tick state
// so the runner machinery applies unchanged.
Scenario asStance(Scenario sc)
{
  if(sc.states.empty())
  {
    FsmState st;
    st.name = "stance";
    st.duration_ticks = 1;
    sc.states.push_back(st);
  }
  return sc;
}

std::ostream & openOutput(const std::string & path, std::ofstream & file)
{
  if(path.empty())
  {
    return std::cout;
  }
  file.open(path);
  if(!file)
  {
    throw Error("cannot open output file '" + path + "'");
  }
  return file;
}

const char * statusName(SolveStatus s)
{
  switch(s)
  {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    default: return "max_iter";
  }
}

int cmdSolve(const std::string & path, const CommonOpts & opts)
{
  Scenario sc = asStance(loadScenario(path, opts));
  ScenarioRunner runner(sc, opts.seed);
  std::vector<Contact> contacts = runner.contactsAt(0);
  ConstraintBlocks blocks = assemble(sc.robot.mass, sc.robot.gravity, contacts);
  Vec3 comTarget = sc.states[0].com_target.value_or(Vec3::Zero());
  ChebyTargets targets = ChebyTargets::fromWeights(blocks, sc.weights, comTarget);
  ChebyProblem problem = augment(blocks, targets, sc.scaling);
  ChebySolver solver;
  ChebySolution sol = solver.solve(problem);

  std::ofstream file;
  std::ostream & out = openOutput(opts.output, file);
  if(opts.format == "json")
  {
    nlohmann::json doc;
    doc["status"] = statusName(sol.status);
    doc["com"] = {sol.com.x(), sol.com.y(), sol.com.z()};
    doc["radius"] = sol.radius;
    doc["solve_time_us"] = sol.solve_time * 1e6;
    nlohmann::json wr = nlohmann::json::object();
    for(size_t k = 0; k < sol.wrenches.size(); ++k)
    {
      const Vec6 v = sol.wrenches[k].vector();
      wr[sol.contact_ids[k]] = {v(0), v(1), v(2), v(3), v(4), v(5)};
    }
    doc["wrenches"] = wr;
    if(sol.status == SolveStatus::Optimal)
    {
      doc["r_w"] = wrenchRange(sol, blocks.num_active).r_w;
    }
    out << doc.dump(2) << "\n";
  }
  else
  {
    out << "status: " << statusName(sol.status) << "\n";
    if(sol.status == SolveStatus::Optimal)
    {
      out << "com: " << fmt(sol.com.x()) << " " << fmt(sol.com.y()) << " " << fmt(sol.com.z())
          << "\n";
      for(size_t k = 0; k < sol.wrenches.size(); ++k)
      {
        const Vec6 v = sol.wrenches[k].vector();
        out << "wrench " << sol.contact_ids[k] << ":";
        for(int i = 0; i < 6; ++i)
        {
          out << " " << fmt(v(i));
        }
        out << "\n";
      }
      out << "radius: " << fmt(sol.radius) << "\n";
      out << "r_w: " << fmt(wrenchRange(sol, blocks.num_active).r_w) << "\n";
    }
    out << "solve_time_us: " << fmt(sol.solve_time * 1e6) << "\n";
  }
  return sol.status == SolveStatus::Optimal ? kExitOk : kExitInfeasible;
}

int cmdRun(const std::string & path, const CommonOpts & opts)
{
  Scenario sc = loadScenario(path, opts);
  if(sc.states.empty())
  {
    throw Error("run: scenario has no states");
  }
  ScenarioRunner runner(sc, opts.seed);
  RunResult result = runner.run();

  std::ofstream file;
  std::ostream & out = openOutput(opts.output, file);
  if(opts.format == "json")
  {
    writeTraceJson(out, sc, result, opts.seed, opts.timing);
  }
  else
  {
    writeTraceCsv(out, sc, result, opts.timing);
  }
  if(!opts.output.empty())
  {
    std::cout << summaryText(result.summary);
  }
  return result.summary.completed ? kExitOk : kExitInfeasible;
}

int cmdValidate(const std::string & path, const CommonOpts & opts, int samples, int corruptRow)
{
  Scenario sc = asStance(loadScenario(path, opts));
  ScenarioRunner runner(sc, opts.seed);
  std::vector<Contact> contacts = runner.contactsAt(0);
  ConstraintBlocks blocks = assemble(sc.robot.mass, sc.robot.gravity, contacts);

  // Radius comparison runs the pure max-r program on both routes.
  ChebyTargets zeroTargets = ChebyTargets::fromWeights(blocks, ChebyWeights::zero(), Vec3::Zero());
  ChebyProblem problem = augment(blocks, zeroTargets, sc.scaling);
  oracle::ChebyCenter lp =
      oracle::chebyshevLP(problem.scaledG(), problem.scaledH(), problem.scaledA(), problem.b_eq);

  if(corruptRow >= 0)
  {
    if(corruptRow >= problem.numIneq())
    {
      throw Error("--corrupt-g-row out of range");
    }
    // Diagnostic self-test: perturb one QP-side row into a binding
    // position, leaving the oracle's copy untouched, and confirm the
    // comparison trips.
    problem.G_star.row(corruptRow).head(problem.numY()) *= 1.2;
    problem.h_star(corruptRow) *= 0.3;
  }

  ChebySolver solver;
  ChebySolution sol = solver.solve(problem);

  bool qpFeasible = sol.status == SolveStatus::Optimal;
  bool lpFeasible = lp.kind == oracle::ChebyKind::Ok;
  bool agreeVerdict = qpFeasible == lpFeasible;
  double radiusError = 0.0;
  bool agreeRadius = true;
  if(qpFeasible && lpFeasible)
  {
    radiusError = std::abs(sol.radius - lp.radius) / std::max(1.0, std::abs(lp.radius));
    agreeRadius = radiusError <= 1e-6;
  }

  int ballViolations = -1;
  double ballMaxResidual = 0.0;
  if(qpFeasible)
  {
    auto report = oracle::ballSample(problem, sol, samples, opts.seed);
    ballViolations = report.violations;
    ballMaxResidual = report.max_residual;
  }

  bool coplanar = !contacts.empty();
  for(const auto & c : contacts)
  {
    if(c.active()
       && (c.mode != ContactMode::Fixed
           || std::abs(c.transform.rotation.col(2).z() - 1.0) > 1e-9
           || std::abs(c.transform.origin.z() - contacts.front().transform.origin.z()) > 1e-9))
    {
      coplanar = false;
    }
  }
  bool hullOk = true;
  double hullMargin = 0.0;
  if(coplanar && qpFeasible)
  {
    auto check = oracle::supportPolygonCheck(contacts, sol.com);
    hullMargin = check.margin;
    hullOk = check.margin >= -1e-9;
  }

  bool pass = agreeVerdict && agreeRadius && ballViolations <= 0 && hullOk;

  std::ofstream file;
  std::ostream & out = openOutput(opts.output, file);
  const char * lpName = lpFeasible ? "optimal"
                        : lp.kind == oracle::ChebyKind::Empty ? "infeasible" : "unbounded";
  if(opts.format == "json")
  {
    nlohmann::json doc;
    doc["qp_status"] = statusName(sol.status);
    doc["lp_status"] = lpName;
    doc["qp_radius"] = sol.radius;
    doc["lp_radius"] = lp.radius;
    doc["radius_rel_error"] = radiusError;
    doc["ball_samples"] = samples;
    doc["ball_violations"] = ballViolations;
    doc["ball_max_residual"] = ballMaxResidual;
    if(coplanar && qpFeasible)
    {
      doc["hull_margin"] = hullMargin;
    }
    doc["pass"] = pass;
    out << doc.dump(2) << "\n";
  }
  else
  {
    out << "qp: " << statusName(sol.status) << " radius " << fmt(sol.radius) << "\n";
    out << "lp: " << lpName << " radius " << fmt(lp.radius) << "\n";
    out << "radius relative error: " << fmt(radiusError) << (agreeRadius ? " (ok)" : " (DISAGREE)")
        << "\n";
    if(ballViolations >= 0)
    {
      out << "ball sample: " << samples << " samples, " << ballViolations
          << " violations, max residual " << fmt(ballMaxResidual) << "\n";
    }
    if(coplanar && qpFeasible)
    {
      out << "hull margin: " << fmt(hullMargin) << " m\n";
    }
    out << (pass ? "validate: PASS\n" : "validate: FAIL\n");
  }
  return pass ? kExitOk : kExitInfeasible;
}

int cmdBench(const std::string & path, const CommonOpts & opts, int iterations)
{
  Scenario sc = asStance(loadScenario(path, opts));
  ScenarioRunner runner(sc, opts.seed);
  std::vector<Contact> contacts = runner.contactsAt(0);
  ConstraintBlocks blocks = assemble(sc.robot.mass, sc.robot.gravity, contacts);
  ChebyTargets targets = ChebyTargets::fromWeights(
      blocks, sc.weights, sc.states[0].com_target.value_or(Vec3::Zero()));
  ChebyProblem problem = augment(blocks, targets, sc.scaling);
  ChebySolver solver;

  ChebySolution first = solver.solve(problem);
  if(first.status != SolveStatus::Optimal)
  {
    std::cerr << "bench: stance is " << statusName(first.status) << ", refusing to benchmark\n";
    return kExitInfeasible;
  }

  auto percentile = [](std::vector<double> & v, double p) {
    std::sort(v.begin(), v.end());
    size_t i = static_cast<size_t>(p * (v.size() - 1));
    return v[i];
  };

  std::vector<double> cold(iterations), warm(iterations);
  for(int i = 0; i < iterations; ++i)
  {
    cold[i] = solver.solve(problem).solve_time;
  }
  ChebySolution prev = first;
  for(int i = 0; i < iterations; ++i)
  {
    ChebySolution s = solver.solve(problem, prev);
    warm[i] = s.solve_time;
    prev = s;
  }

  std::ofstream file;
  std::ostream & out = openOutput(opts.output, file);
  out << "iterations: " << iterations << "\n";
  out << "cold us (median/p99): " << fmt(percentile(cold, 0.5) * 1e6) << " / "
      << fmt(percentile(cold, 0.99) * 1e6) << "\n";
  out << "warm us (median/p99): " << fmt(percentile(warm, 0.5) * 1e6) << " / "
      << fmt(percentile(warm, 0.99) * 1e6) << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char ** argv)
{
  std::setlocale(LC_ALL, "C");

  CLI::App app{"Multi-contact balance solver: Chebyshev-center QP over "
               "fixed and sliding contacts"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string path;
  int samples = 10000;
  int corruptRow = -1;
  int iterations = 1000;

  auto addCommon = [&](CLI::App * cmd) {
    cmd->add_option("file", path, "scenario/stance file")->required();
    cmd->add_option("--output", opts.output, "write result to a file");
    cmd->add_option("--format", opts.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--filter", opts.filter, "friction filter: paper or recursive")
        ->check(CLI::IsMember({"paper", "recursive"}));
    cmd->add_option("--sign", opts.sign, "sliding sign convention: paper or oppose")
        ->check(CLI::IsMember({"paper", "oppose"}));
    cmd->add_option("--weights", opts.weights_file, "weight/scale override file");
  };

  CLI::App * solve = app.add_subcommand("solve", "solve one stance and print the solution");
  addCommon(solve);
  CLI::App * run = app.add_subcommand("run", "play a scenario and write its trace");
  addCommon(run);
  run->add_flag("--timing", opts.timing,
                "write measured per-row solve times (traces then vary between reruns)");
  CLI::App * validate = app.add_subcommand("validate", "cross-check a stance against the oracle");
  addCommon(validate);
  validate->add_option("--samples", samples, "ball sample count");
  validate->add_option("--corrupt-g-row", corruptRow,
                       "diagnostic: perturb one QP constraint row before comparing");
  CLI::App * bench = app.add_subcommand("bench", "time repeated solves of one stance");
  addCommon(bench);
  bench->add_option("--iterations", iterations, "number of timed solves");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if(solve->parsed())
    {
      return cmdSolve(path, opts);
    }
    if(run->parsed())
    {
      return cmdRun(path, opts);
    }
    if(validate->parsed())
    {
      return cmdValidate(path, opts, samples, corruptRow);
    }
    if(bench->parsed())
    {
      return cmdBench(path, opts, iterations);
    }
  }
  catch(const ParseError & e)
  {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  catch(const std::exception & e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
