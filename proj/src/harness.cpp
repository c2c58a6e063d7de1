#include "chebybal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chebybal {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kVelocityEps = 1e-9; // m/s; below this a slide pauses

} // namespace

Vec2 SlidingPath::offsetAt(double tickInState) const
{
  double theta = kTwoPi * tickInState / period_ticks;
  if(kind == Kind::Circle)
  {
    return radius * Vec2(std::cos(theta) - 1.0, std::sin(theta));
  }
  return radius * std::sin(theta) * line_dir.normalized();
}

Vec2 SlidingPath::velocityAt(double tickInState, double tickSeconds) const
{
  double omega = kTwoPi / (period_ticks * tickSeconds);
  double theta = kTwoPi * tickInState / period_ticks;
  if(kind == Kind::Circle)
  {
    return radius * omega * Vec2(-std::sin(theta), std::cos(theta));
  }
  return radius * omega * std::cos(theta) * line_dir.normalized();
}

const Contact * Scenario::findContact(const std::string & id) const
{
  for(const auto & c : contacts)
  {
    if(c.id == id)
    {
      return &c;
    }
  }
  return nullptr;
}

int Scenario::totalTicks() const
{
  int total = 0;
  for(const auto & s : states)
  {
    total += s.duration_ticks;
  }
  return total;
}

void Scenario::validate() const
{
  if(robot.mass <= 0.0)
  {
    throw Error("scenario: robot mass must be positive");
  }
  if(tick_seconds <= 0.0)
  {
    throw Error("scenario: tick must be positive");
  }
  if(noise_sigma < 0.0)
  {
    throw Error("scenario: noise sigma must be nonnegative");
  }
  if(contacts.empty())
  {
    throw Error("scenario: no contacts declared");
  }
  for(const auto & c : contacts)
  {
    if(!isRotation(c.transform.rotation))
    {
      throw Error("scenario: contact '" + c.id + "' rotation is not orthonormal");
    }
    c.limits.validate(c.id);
  }
  for(const auto & s : states)
  {
    if(s.duration_ticks <= 0)
    {
      throw Error("scenario: state '" + s.name + "' has nonpositive duration");
    }
    auto checkId = [&](const std::string & id, const char * what) {
      if(!findContact(id))
      {
        throw Error("scenario: state '" + s.name + "' references unknown contact '" + id
                    + "' in " + what);
      }
    };
    for(const auto & [id, mode] : s.contact_modes)
    {
      (void)mode;
      checkId(id, "mode");
    }
    for(const auto & [id, f] : s.force_targets)
    {
      checkId(id, "force target");
      const Contact * c = findContact(id);
      if(c && (f < c->limits.fz_min || f > c->limits.fz_max))
      {
        throw Error("scenario: state '" + s.name + "' force target for '" + id
                    + "' outside fz bounds");
      }
    }
    for(const auto & [id, path] : s.sliding_paths)
    {
      checkId(id, "path");
      if(path.period_ticks <= 0)
      {
        throw Error("scenario: state '" + s.name + "' path for '" + id
                    + "' has nonpositive period");
      }
    }
  }
}

ScenarioRunner::ScenarioRunner(Scenario scenario, uint64_t seed)
    : scenario_(std::move(scenario)), rng_(seed)
{
  scenario_.validate();
  for(const auto & c : scenario_.contacts)
  {
    // The static bound is the a-priori guess the online estimate refines.
    estimators_.emplace(c.id, FrictionEstimator(0.9, 5.0, c.limits.mu));
  }
}

const FsmState & ScenarioRunner::stateAt(int tick, int * tickInState) const
{
  int t = tick;
  for(const auto & s : scenario_.states)
  {
    if(t < s.duration_ticks)
    {
      if(tickInState)
      {
        *tickInState = t;
      }
      return s;
    }
    t -= s.duration_ticks;
  }
  throw Error("stateAt: tick beyond scenario end");
}

std::vector<Contact> ScenarioRunner::contactsAt(int tick) const
{
  int tickInState = 0;
  const FsmState & state = stateAt(tick, &tickInState);

  std::vector<Contact> contacts = scenario_.contacts;
  for(auto & c : contacts)
  {
    auto modeIt = state.contact_modes.find(c.id);
    if(modeIt != state.contact_modes.end())
    {
      c.mode = modeIt->second;
    }
    if(c.mode != ContactMode::Sliding)
    {
      c.sliding.reset();
      continue;
    }
    SlidingSpec spec = c.sliding.value_or(SlidingSpec{});
    spec.sign = scenario_.sign;
    if(spec.mu_dynamic <= 0.0)
    {
      spec.mu_dynamic = c.limits.mu;
    }
    auto forceIt = state.force_targets.find(c.id);
    if(forceIt != state.force_targets.end())
    {
      spec.fz_des = forceIt->second;
    }
    auto pathIt = state.sliding_paths.find(c.id);
    if(pathIt != state.sliding_paths.end())
    {
      const SlidingPath & path = pathIt->second;
      Vec2 offset = path.offsetAt(tickInState);
      Vec2 velocity = path.velocityAt(tickInState, scenario_.tick_seconds);
      c.transform.origin += c.transform.rotation * Vec3(offset.x(), offset.y(), 0.0);
      spec.velocity_tangent = velocity;
    }
    if(spec.velocity_tangent.norm() < kVelocityEps)
    {
      // Direction reversal: no defined slip direction this tick.
      c.mode = ContactMode::Fixed;
      c.sliding.reset();
    }
    else
    {
      c.sliding = spec;
    }
  }
  return contacts;
}

TraceRow ScenarioRunner::step(int tick)
{
  int tickInState = 0;
  const FsmState & state = stateAt(tick, &tickInState);
  std::vector<Contact> contacts = contactsAt(tick);

  ConstraintBlocks blocks = assemble(scenario_.robot.mass, scenario_.robot.gravity, contacts);

  Vec3 comTarget = state.com_target.value_or(last_com_);
  ChebyTargets targets = ChebyTargets::fromWeights(blocks, scenario_.weights, comTarget);
  for(int k = 0; k < blocks.num_active; ++k)
  {
    const Contact * c = nullptr;
    for(const auto & cand : contacts)
    {
      if(cand.id == blocks.contact_ids[k])
      {
        c = &cand;
        break;
      }
    }
    double fzDes = 0.0;
    auto it = state.force_targets.find(blocks.contact_ids[k]);
    if(it != state.force_targets.end())
    {
      fzDes = it->second;
    }
    else if(c && c->sliding)
    {
      fzDes = c->sliding->fz_des;
    }
    if(c && fzDes > 0.0)
    {
      targets.y_des.segment<3>(blocks.wrenchColumn(k)) =
          c->transform.rotation * Vec3(0.0, 0.0, fzDes);
    }
  }

  ChebyProblem problem = augment(blocks, targets, scenario_.scaling);
  ChebySolution sol = has_solution_ ? solver_.solve(problem, last_solution_)
                                    : solver_.solve(problem);

  TraceRow row;
  row.tick = tick;
  row.state = state.name;
  row.status = sol.status;
  row.solve_time = sol.solve_time;
  row.max_violation = sol.max_violation;

  if(sol.status == SolveStatus::Optimal)
  {
    last_solution_ = sol;
    has_solution_ = true;
    last_com_ = sol.com;
    row.com = sol.com;
    row.radius = sol.radius;
    row.r_w = wrenchRange(sol, blocks.num_active).r_w;
  }
  else
  {
    last_failed_ = sol;
  }

  row.wrenches.assign(scenario_.contacts.size(), Vec6::Zero());
  row.mu_mes.assign(scenario_.contacts.size(), 0.0);
  row.mu_filt.assign(scenario_.contacts.size(), 0.0);
  for(size_t i = 0; i < scenario_.contacts.size(); ++i)
  {
    const std::string & id = scenario_.contacts[i].id;
    int k = blocks.indexOf(id);
    const Contact * c = nullptr;
    for(const auto & cand : contacts)
    {
      if(cand.id == id)
      {
        c = &cand;
        break;
      }
    }
    if(k >= 0 && sol.status == SolveStatus::Optimal)
    {
      row.wrenches[i] = sol.wrenches[k].vector();
      if(c && c->mode == ContactMode::Sliding)
      {
        // Sensing boundary: the estimator sees a noisy local force.
        Vec3 fLocal = c->transform.rotation.transpose() * sol.wrenches[k].force;
        for(int ax = 0; ax < 3; ++ax)
        {
          fLocal(ax) += rng_.gaussian(0.0, scenario_.noise_sigma);
        }
        estimators_.at(id).apply(scenario_.filter, fLocal);
      }
    }
    const FrictionEstimator & est = estimators_.at(id);
    row.mu_mes[i] = est.muMeasuredPrev();
    row.mu_filt[i] = est.muFiltered();
  }
  return row;
}

RunResult ScenarioRunner::run()
{
  RunResult result;
  RunSummary & sum = result.summary;
  sum.min_radius = std::numeric_limits<double>::infinity();
  double totalSolve = 0.0;

  const int total = scenario_.totalTicks();
  for(int tick = 0; tick < total; ++tick)
  {
    TraceRow row = step(tick);
    result.rows.push_back(row);
    ++sum.ticks_run;
    totalSolve += row.solve_time;
    sum.max_solve_time = std::max(sum.max_solve_time, row.solve_time);

    if(row.status != SolveStatus::Optimal)
    {
      sum.completed = false;
      sum.halt_reason = "tick " + std::to_string(tick) + " in state '" + row.state + "': "
                        + (row.status == SolveStatus::Infeasible ? "infeasible constraint set"
                                                                 : "solver failure");
      // Name rows the phase-1 point could not satisfy.
      std::vector<Contact> contacts = contactsAt(tick);
      ConstraintBlocks blocks =
          assemble(scenario_.robot.mass, scenario_.robot.gravity, contacts);
      ChebyTargets targets = ChebyTargets::fromWeights(
          blocks, scenario_.weights, stateAt(tick).com_target.value_or(last_com_));
      ChebyProblem problem = augment(blocks, targets, scenario_.scaling);
      if(last_failed_.x_scaled.size() == problem.numY() + 1)
      {
        Eigen::VectorXd resid = problem.G_star * last_failed_.x_scaled - problem.h_star;
        for(int j = 0; j < resid.size(); ++j)
        {
          if(resid(j) > 1e-7)
          {
            sum.violated_rows.push_back(problem.row_labels[j]);
          }
        }
        Eigen::VectorXd eqResid = problem.A_star * last_failed_.x_scaled - problem.b_eq;
        for(int j = 0; j < eqResid.size(); ++j)
        {
          if(std::abs(eqResid(j)) > 1e-7)
          {
            sum.violated_rows.push_back(problem.eq_labels[j]);
          }
        }
      }
      sum.mean_solve_time = totalSolve / sum.ticks_run;
      if(!std::isfinite(sum.min_radius))
      {
        sum.min_radius = 0.0;
      }
      return result;
    }

    sum.min_radius = std::min(sum.min_radius, row.radius);

    // Newton-Euler residual recomputed from the emitted wrenches.
    std::vector<Contact> contacts = contactsAt(tick);
    Wrench net = gravityWrench(scenario_.robot.mass, scenario_.robot.gravity, row.com);
    for(size_t i = 0; i < scenario_.contacts.size(); ++i)
    {
      const Contact * c = nullptr;
      for(const auto & cand : contacts)
      {
        if(cand.id == scenario_.contacts[i].id)
        {
          c = &cand;
          break;
        }
      }
      if(!c || !c->active())
      {
        continue;
      }
      Vec3 f = row.wrenches[i].head<3>();
      Vec3 tau = row.wrenches[i].tail<3>();
      net.force += f;
      net.torque += c->transform.origin.cross(f) + tau;
    }
    sum.max_eq_residual =
        std::max({sum.max_eq_residual, net.force.lpNorm<Eigen::Infinity>(),
                  net.torque.lpNorm<Eigen::Infinity>()});
  }

  sum.completed = true;
  sum.mean_solve_time = sum.ticks_run > 0 ? totalSolve / sum.ticks_run : 0.0;
  if(!std::isfinite(sum.min_radius))
  {
    sum.min_radius = 0.0;
  }
  return result;
}

RunResult run(const Scenario & scenario, uint64_t seed)
{
  ScenarioRunner runner(scenario, seed);
  return runner.run();
}

} // namespace chebybal
