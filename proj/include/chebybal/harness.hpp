#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chebybal/cheby_qp.hpp"
#include "chebybal/contacts.hpp"
#include "chebybal/friction_est.hpp"
#include "chebybal/rng.hpp"

namespace chebybal {

// Parametric in-plane trajectory of a sliding contact. Circle loops at
// constant speed; Line oscillates along a tangent direction and crosses
// zero velocity at the turning points.
struct SlidingPath {
  enum class Kind { Circle, Line };
  Kind kind = Kind::Circle;
  double radius = 0.1;    // circle radius / line amplitude (m)
  int period_ticks = 200; // one full cycle
  Vec2 line_dir = Vec2(1.0, 0.0);

  // Offset (m) and velocity (m/s) in the contact tangent plane at a time
  // measured in ticks from the state entry.
  Vec2 offsetAt(double tickInState) const;
  Vec2 velocityAt(double tickInState, double tickSeconds) const;
};

struct FsmState {
  std::string name;
  int duration_ticks = 1;
  std::map<std::string, ContactMode> contact_modes;
  std::optional<Vec3> com_target;
  std::map<std::string, double> force_targets; // desired normal force (N)
  std::map<std::string, SlidingPath> sliding_paths;
};

struct RobotSpec {
  double mass = 40.0;
  double gravity = 9.81;
};

struct Scenario {
  RobotSpec robot;
  std::vector<Contact> contacts; // declaration order fixes trace columns
  std::vector<FsmState> states;
  double noise_sigma = 0.0;   // force-sensor noise (N)
  double tick_seconds = 0.005;
  ChebyWeights weights;
  UnitScaling scaling;
  FilterKind filter = FilterKind::Paper;
  SignConvention sign = SignConvention::OpposeVelocity;

  const Contact * findContact(const std::string & id) const;
  void validate() const; // referenced ids exist, durations positive
  int totalTicks() const;
};

struct TraceRow {
  int tick = 0;
  std::string state;
  Vec3 com = Vec3::Zero();
  std::vector<Vec6> wrenches; // one per declared contact, zero when inactive
  double radius = 0.0;
  double r_w = 0.0;
  std::vector<double> mu_mes;  // per declared contact, estimator state
  std::vector<double> mu_filt;
  double solve_time = 0.0; // seconds
  double max_violation = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
};

struct RunSummary {
  bool completed = false;
  int ticks_run = 0;
  std::string halt_reason;
  std::vector<std::string> violated_rows;
  double max_eq_residual = 0.0;
  double min_radius = 0.0;
  double mean_solve_time = 0.0;
  double max_solve_time = 0.0;
};

struct RunResult {
  std::vector<TraceRow> rows;
  RunSummary summary;
};

// Plays one scenario tick by tick: resolves the FSM state, builds the
// contact set (sliding velocities from the path derivatives), solves the
// Chebyshev QP warm-started from the previous tick, feeds noise-injected
// force readings to the friction estimators and emits one row per tick.
class ScenarioRunner {
public:
  ScenarioRunner(Scenario scenario, uint64_t seed);

  // One tick; `tick` must advance monotonically from 0.
  TraceRow step(int tick);

  RunResult run();

  const Scenario & scenario() const { return scenario_; }
  const ChebySolution & lastSolution() const { return last_solution_; }

  // Contacts configured for a given tick (positions/velocities on paths).
  std::vector<Contact> contactsAt(int tick) const;
  const FsmState & stateAt(int tick, int * tickInState = nullptr) const;

private:
  Scenario scenario_;
  ChebySolver solver_;
  Rng rng_;
  std::map<std::string, FrictionEstimator> estimators_;
  ChebySolution last_solution_;
  ChebySolution last_failed_;
  bool has_solution_ = false;
  Vec3 last_com_ = Vec3::Zero();
};

RunResult run(const Scenario & scenario, uint64_t seed);

} // namespace chebybal
